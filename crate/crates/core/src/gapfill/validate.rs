//! Replays a fill trace against a fresh reconstruction of the star model.
//!
//! The fill schedule, contexts and rule matching are recomputed here from
//! first principles (closed-form schedule, explicit per-position acceptance
//! sets) rather than by calling back into the filler.

use std::fmt;

use serde::Serialize;

use super::fill::{FillPolicy, FillTrace, MismatchHandling};
use super::rules::{ConstraintRuleTable, Context, GapClass, PositionPattern};
use crate::nucleotide::{Base, BaseSet, NucleotideSequence};
use crate::starmodel::StarModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ViolationKind {
    Schedule,
    Context,
    Rule,
    ChosenNotAllowed,
    StreamOrder,
    StreamContent,
    EventCount,
    Length,
    ConsensusAltered,
    FillMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// Index into the trace, when the violation belongs to an event.
    pub event: Option<usize>,
    pub kind: ViolationKind,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.event {
            Some(i) => write!(f, "event {i}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

struct Expected {
    pass: usize,
    run_start: usize,
    column: usize,
    class: GapClass,
}

/// Pass `p` fills column `start + p - 1` of every run of length at least `p`.
fn schedule(model: &StarModel) -> Vec<Expected> {
    let mut out = Vec::new();
    for pass in 1..=model.max_run_length() {
        for run in model.gap_runs().iter().filter(|r| r.length >= pass) {
            out.push(Expected {
                pass,
                run_start: run.start,
                column: run.start + pass - 1,
                class: if run.length - pass + 1 > 1 {
                    GapClass::Multi
                } else {
                    GapClass::Single
                },
            });
        }
    }
    out
}

fn accepted(p: &PositionPattern) -> Vec<Option<Base>> {
    let mut cells: Vec<Option<Base>> = vec![None];
    cells.extend(Base::ALL.iter().map(|b| Some(*b)));
    cells
        .into_iter()
        .filter(|cell| match p {
            PositionPattern::Any => true,
            PositionPattern::Unavailable => cell.is_none(),
            PositionPattern::OneOf(set) => cell.is_some_and(|b| set.contains(b)),
        })
        .collect()
}

fn replay_rule<'t>(table: &'t ConstraintRuleTable, ctx: &Context, class: GapClass) -> Option<(&'t str, BaseSet)> {
    let values = ctx.positions();
    table
        .rules()
        .iter()
        .filter(|r| r.class == class)
        .find(|r| {
            r.pattern
                .positions()
                .iter()
                .zip(values.iter())
                .all(|(p, v)| accepted(p).contains(v))
        })
        .map(|r| (r.id.as_str(), r.allowed))
}

pub fn validate_trace(
    model: &StarModel,
    trace: &FillTrace,
    output: &NucleotideSequence,
    table: &ConstraintRuleTable,
) -> Vec<Violation> {
    let mut violations = Vec::new();
    let mut push = |event: Option<usize>, kind: ViolationKind, message: String| {
        violations.push(Violation {
            event,
            kind,
            message,
        })
    };

    let expected = schedule(model);
    if expected.len() != trace.events.len() {
        push(
            None,
            ViolationKind::EventCount,
            format!(
                "trace has {} events, model has {} gap columns",
                trace.events.len(),
                expected.len()
            ),
        );
    }

    let mut state: Vec<Option<Base>> = model.columns().to_vec();
    let mut next_stream = 0usize;

    for (i, (event, exp)) in trace.events.iter().zip(expected.iter()).enumerate() {
        let ev = Some(i);
        if (event.pass, event.run_start, event.column) != (exp.pass, exp.run_start, exp.column) {
            push(
                ev,
                ViolationKind::Schedule,
                format!(
                    "filled column {} (pass {}, run {}) but schedule expects column {} (pass {}, run {})",
                    event.column, event.pass, event.run_start, exp.column, exp.pass, exp.run_start
                ),
            );
        }

        let context = Context::at(&state, exp.column);
        if context != event.context {
            push(
                ev,
                ViolationKind::Context,
                format!("recorded context {} but reconstruction gives {}", event.context, context),
            );
        }

        match replay_rule(table, &context, exp.class) {
            Some((id, allowed)) => {
                if id != event.rule_id || allowed != event.allowed {
                    push(
                        ev,
                        ViolationKind::Rule,
                        format!(
                            "recorded rule {} {} but {} {} fires for {} ({} gap)",
                            event.rule_id, event.allowed, id, allowed, context, exp.class
                        ),
                    );
                }
                if !allowed.contains(event.chosen) && event.allowed.contains(event.chosen) {
                    push(
                        ev,
                        ViolationKind::ChosenNotAllowed,
                        format!("chosen {} not in recomputed allowed set {allowed}", event.chosen),
                    );
                }
            }
            None => push(
                ev,
                ViolationKind::Rule,
                format!("no {} gap rule matches {}", exp.class, context),
            ),
        }
        if !event.allowed.contains(event.chosen) {
            push(
                ev,
                ViolationKind::ChosenNotAllowed,
                format!("chosen {} not in recorded allowed set {}", event.chosen, event.allowed),
            );
        }

        if event.stream_index != next_stream + event.skipped {
            push(
                ev,
                ViolationKind::StreamOrder,
                format!(
                    "stream index {} with {} skipped, expected {}",
                    event.stream_index,
                    event.skipped,
                    next_stream + event.skipped
                ),
            );
        }
        next_stream = event.stream_index.max(next_stream) + 1;

        state[exp.column] = Some(event.chosen);
    }

    let out = output.bases();
    if out.len() != model.len() {
        push(
            None,
            ViolationKind::Length,
            format!("output has {} bases, model has {} columns", out.len(), model.len()),
        );
    }
    for (col, (&cell, &base)) in state.iter().zip(out.iter()).enumerate() {
        match (model.columns()[col], cell) {
            (Some(consensus), _) if consensus != base => push(
                None,
                ViolationKind::ConsensusAltered,
                format!("consensus altered at column {col}: {consensus} became {base}"),
            ),
            (None, Some(filled)) if filled != base => push(
                None,
                ViolationKind::FillMismatch,
                format!("column {col}: trace chose {filled} but output has {base}"),
            ),
            (None, None) => push(
                None,
                ViolationKind::FillMismatch,
                format!("gap column {col} has no fill event"),
            ),
            _ => {}
        }
    }

    violations
}

/// Checks that every event's symbols agree with the actual stream under
/// `policy`: skipped symbols were disallowed, the consumed one was used as
/// the policy dictates.
pub fn validate_stream_usage(trace: &FillTrace, stream: &[u8], policy: &FillPolicy) -> Vec<Violation> {
    let mut violations = Vec::new();
    for (i, event) in trace.events.iter().enumerate() {
        let mut fail = |kind, message| {
            violations.push(Violation {
                event: Some(i),
                kind,
                message,
            })
        };
        let Some(&raw) = stream.get(event.stream_index) else {
            fail(
                ViolationKind::StreamContent,
                format!("stream index {} beyond stream of {}", event.stream_index, stream.len()),
            );
            continue;
        };
        let consumed = Base::from_byte(raw);
        let skipped_range = event.stream_index.saturating_sub(event.skipped)..event.stream_index;
        for idx in skipped_range {
            if Base::from_byte(stream[idx]).is_none_or(|b| event.allowed.contains(b)) {
                fail(
                    ViolationKind::StreamContent,
                    format!("skipped stream symbol {} at {idx} was allowed", stream[idx] as char),
                );
            }
        }
        let expected = match (policy.mismatch(), consumed) {
            (_, Some(b)) if event.allowed.contains(b) => Some(b),
            (MismatchHandling::SubstituteFirstAllowed, Some(_)) => Some(policy.substitute(event.allowed)),
            _ => None,
        };
        if expected != Some(event.chosen) {
            fail(
                ViolationKind::StreamContent,
                format!(
                    "stream symbol {} at {} does not yield chosen {} under {} policy",
                    raw as char,
                    event.stream_index,
                    event.chosen,
                    policy.mismatch()
                ),
            );
        }
    }
    violations
}
