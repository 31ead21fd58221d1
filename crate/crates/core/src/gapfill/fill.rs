use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use super::rules::{ConstraintRuleTable, Context, GapClass};
use crate::nucleotide::{Base, BaseSet, NucleotideSequence};
use crate::starmodel::StarModel;

/// What to do when the next stream symbol is not allowed at the column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub enum MismatchHandling {
    /// Discard disallowed symbols until an allowed one arrives.
    #[default]
    SkipUntilAllowed,
    /// Consume one symbol; if disallowed, place the first allowed base of
    /// the substitution order instead.
    SubstituteFirstAllowed,
    FailOnMismatch,
}

impl MismatchHandling {
    pub fn name(self) -> &'static str {
        match self {
            MismatchHandling::SkipUntilAllowed => "skip",
            MismatchHandling::SubstituteFirstAllowed => "substitute",
            MismatchHandling::FailOnMismatch => "fail",
        }
    }
}

impl FromStr for MismatchHandling {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "skip" => Ok(MismatchHandling::SkipUntilAllowed),
            "substitute" => Ok(MismatchHandling::SubstituteFirstAllowed),
            "fail" => Ok(MismatchHandling::FailOnMismatch),
            other => Err(format!("unknown policy `{other}` (expected skip, substitute or fail)")),
        }
    }
}

impl fmt::Display for MismatchHandling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FillPolicy {
    mismatch: MismatchHandling,
    substitution_order: [Base; 4],
}

impl Default for FillPolicy {
    fn default() -> Self {
        FillPolicy {
            mismatch: MismatchHandling::SkipUntilAllowed,
            substitution_order: [Base::C, Base::T, Base::G, Base::A],
        }
    }
}

impl FillPolicy {
    pub fn new(mismatch: MismatchHandling) -> Self {
        FillPolicy {
            mismatch,
            ..FillPolicy::default()
        }
    }

    /// Replaces the substitution order; it must be a permutation of A,C,G,T.
    pub fn with_substitution_order(mut self, order: [Base; 4]) -> Result<Self, FillError> {
        if BaseSet::of(&order) != BaseSet::ANY {
            return Err(FillError::BadSubstitutionOrder(order));
        }
        self.substitution_order = order;
        Ok(self)
    }

    pub fn mismatch(&self) -> MismatchHandling {
        self.mismatch
    }

    pub fn substitution_order(&self) -> [Base; 4] {
        self.substitution_order
    }

    pub fn substitute(&self, allowed: BaseSet) -> Base {
        *self
            .substitution_order
            .iter()
            .find(|b| allowed.contains(**b))
            .expect("allowed sets are never empty")
    }
}

/// One filled column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FillEvent {
    /// 1-based pass number.
    pub pass: usize,
    pub run_start: usize,
    pub column: usize,
    pub context: Context,
    pub rule_id: String,
    pub allowed: BaseSet,
    /// Index of the consumed stream symbol.
    pub stream_index: usize,
    /// Symbols discarded right before `stream_index`.
    pub skipped: usize,
    pub chosen: Base,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FillTrace {
    pub events: Vec<FillEvent>,
}

impl FillTrace {
    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn passes(&self) -> usize {
        self.events.iter().map(|e| e.pass).max().unwrap_or(0)
    }

    /// Stream symbols read, consumed or skipped.
    pub fn symbols_read(&self) -> usize {
        self.events.last().map_or(0, |e| e.stream_index + 1)
    }

    pub fn total_skipped(&self) -> usize {
        self.events.iter().map(|e| e.skipped).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FillError {
    #[error("stream exhausted after {read} symbols with {unfilled} gap columns left (next column {column})")]
    StreamExhausted {
        column: usize,
        read: usize,
        unfilled: usize,
    },
    #[error("column {column}: stream symbol {symbol} at index {stream_index} not in {allowed} (rule {rule_id}, context {context})")]
    Mismatch {
        column: usize,
        context: Context,
        rule_id: String,
        allowed: BaseSet,
        symbol: Base,
        stream_index: usize,
    },
    #[error("stream symbol {symbol:?} at index {index} is not a nucleotide")]
    InvalidStreamSymbol { index: usize, symbol: char },
    #[error("substitution order {0:?} is not a permutation of A,C,G,T")]
    BadSubstitutionOrder([Base; 4]),
}

/// Fills every gap of `model` from `stream`.
///
/// Each pass visits the runs left to right and fills the leftmost unfilled
/// column of every unfinished run; multi-gap rules apply while more than one
/// column of the run is open, single-gap rules for the last one. Context is
/// read from the current state, so bases filled earlier are visible.
pub fn fill<I>(
    model: &StarModel,
    stream: I,
    table: &ConstraintRuleTable,
    policy: &FillPolicy,
) -> Result<(NucleotideSequence, FillTrace), FillError>
where
    I: IntoIterator<Item = u8>,
{
    let mut state: Vec<Option<Base>> = model.columns().to_vec();
    let mut filled = vec![0usize; model.gap_runs().len()];
    let mut unfilled = model.gap_count();
    let mut stream = stream.into_iter().enumerate();
    let mut trace = FillTrace::default();
    let mut read = 0usize;
    let mut pass = 0;

    while unfilled > 0 {
        pass += 1;
        for (run, done) in model.gap_runs().iter().zip(filled.iter_mut()) {
            if *done == run.length {
                continue;
            }
            let column = run.start + *done;
            let class = if run.length - *done > 1 {
                GapClass::Multi
            } else {
                GapClass::Single
            };
            let context = Context::at(&state, column);
            let rule = table.first_match(&context, class);

            let mut skipped = 0;
            let (stream_index, chosen) = loop {
                let (index, raw) = stream.next().ok_or(FillError::StreamExhausted {
                    column,
                    read,
                    unfilled,
                })?;
                read = index + 1;
                let symbol = Base::from_byte(raw).ok_or(FillError::InvalidStreamSymbol {
                    index,
                    symbol: raw as char,
                })?;
                if rule.allowed.contains(symbol) {
                    break (index, symbol);
                }
                match policy.mismatch {
                    MismatchHandling::SkipUntilAllowed => skipped += 1,
                    MismatchHandling::SubstituteFirstAllowed => {
                        break (index, policy.substitute(rule.allowed))
                    }
                    MismatchHandling::FailOnMismatch => {
                        return Err(FillError::Mismatch {
                            column,
                            context,
                            rule_id: rule.id.clone(),
                            allowed: rule.allowed,
                            symbol,
                            stream_index: index,
                        })
                    }
                }
            };

            state[column] = Some(chosen);
            *done += 1;
            unfilled -= 1;
            trace.events.push(FillEvent {
                pass,
                run_start: run.start,
                column,
                context,
                rule_id: rule.id.clone(),
                allowed: rule.allowed,
                stream_index,
                skipped,
                chosen,
            });
        }
    }

    let bases = state
        .into_iter()
        .map(|c| c.expect("all gaps filled"))
        .collect();
    let seq = NucleotideSequence::from_bases("filled", bases).expect("star models are non-empty");
    Ok((seq, trace))
}
