//! Context rules deciding which bases may be placed at a gap column.
//!
//! A rule looks at up to two known bases on each side of the column being
//! filled. The table is evaluated first-match within the rules of the gap
//! class being filled (single-gap `A*` rules, multi-gap `B*` rules).
//!
//! Text syntax, one rule per line:
//!
//! ```text
//! A1  TA_A(A|G) -> {C}
//! A7  ·T_A(C|T) -> {T,C}
//! B1  TA_       -> {C,T}
//! A13 else      -> {A,C,G,T}
//! ```
//!
//! Items left of `_` are (second previous, first previous); with a single
//! item it is the first previous. Items right of `_` are (first next, second
//! next); missing items are wildcards. An item is a base, a `(X|Y)` set, a
//! wildcard `·` or `*`, or `~` for "no known base" (sequence edge or a gap
//! that is still unfilled). `→` may replace `->`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::nucleotide::{Base, BaseSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum GapClass {
    /// Last unfilled column of its run.
    Single,
    /// More than one column of the run is still unfilled.
    Multi,
}

impl fmt::Display for GapClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GapClass::Single => "single",
            GapClass::Multi => "multi",
        })
    }
}

/// The four neighbours of a gap column as seen at fill time; `None` is an
/// edge of the sequence or a gap not filled yet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct Context {
    pub prev2: Option<Base>,
    pub prev1: Option<Base>,
    pub next1: Option<Base>,
    pub next2: Option<Base>,
}

impl Context {
    pub fn new(
        prev2: Option<Base>,
        prev1: Option<Base>,
        next1: Option<Base>,
        next2: Option<Base>,
    ) -> Self {
        Context {
            prev2,
            prev1,
            next1,
            next2,
        }
    }

    /// Reads the context of `column` in a partially filled sequence.
    pub fn at(state: &[Option<Base>], column: usize) -> Self {
        let get = |offset: isize| {
            let idx = column as isize + offset;
            if idx < 0 {
                None
            } else {
                state.get(idx as usize).copied().flatten()
            }
        };
        Context::new(get(-2), get(-1), get(1), get(2))
    }

    pub fn positions(&self) -> [Option<Base>; 4] {
        [self.prev2, self.prev1, self.next1, self.next2]
    }
}

impl fmt::Display for Context {
    /// `TA_AG` style, `.` for unavailable positions.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = |b: Option<Base>| b.map_or('.', Base::as_char);
        write!(
            f,
            "{}{}_{}{}",
            c(self.prev2),
            c(self.prev1),
            c(self.next1),
            c(self.next2)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PositionPattern {
    Any,
    /// A known base from the set.
    OneOf(BaseSet),
    /// No known base at this position.
    Unavailable,
}

impl PositionPattern {
    pub fn base(b: Base) -> Self {
        PositionPattern::OneOf(BaseSet::single(b))
    }

    pub fn matches(&self, value: Option<Base>) -> bool {
        match (self, value) {
            (PositionPattern::Any, _) => true,
            (PositionPattern::OneOf(set), Some(b)) => set.contains(b),
            (PositionPattern::OneOf(_), None) => false,
            (PositionPattern::Unavailable, v) => v.is_none(),
        }
    }
}

impl fmt::Display for PositionPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PositionPattern::Any => f.write_str("·"),
            PositionPattern::Unavailable => f.write_str("~"),
            PositionPattern::OneOf(set) if set.len() == 1 => f.write_str(&set.letters()),
            PositionPattern::OneOf(set) => {
                let parts: Vec<String> = set.iter().map(|b| b.to_string()).collect();
                write!(f, "({})", parts.join("|"))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ContextPattern {
    pub prev2: PositionPattern,
    pub prev1: PositionPattern,
    pub next1: PositionPattern,
    pub next2: PositionPattern,
}

impl ContextPattern {
    pub const ANY: ContextPattern = ContextPattern {
        prev2: PositionPattern::Any,
        prev1: PositionPattern::Any,
        next1: PositionPattern::Any,
        next2: PositionPattern::Any,
    };

    pub fn matches(&self, ctx: &Context) -> bool {
        self.prev2.matches(ctx.prev2)
            && self.prev1.matches(ctx.prev1)
            && self.next1.matches(ctx.next1)
            && self.next2.matches(ctx.next2)
    }

    pub fn is_catch_all(&self) -> bool {
        *self == ContextPattern::ANY
    }

    pub fn positions(&self) -> [PositionPattern; 4] {
        [self.prev2, self.prev1, self.next1, self.next2]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintRule {
    pub id: String,
    pub class: GapClass,
    pub pattern: ContextPattern,
    pub allowed: BaseSet,
}

impl fmt::Display for ConstraintRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ", self.id)?;
        let p = &self.pattern;
        if p.is_catch_all() {
            f.write_str("else")?;
        } else if self.class == GapClass::Multi
            && p.next1 == PositionPattern::Any
            && p.next2 == PositionPattern::Any
        {
            write!(f, "{}{}_", p.prev2, p.prev1)?;
        } else {
            write!(f, "{}{}_{}{}", p.prev2, p.prev1, p.next1, p.next2)?;
        }
        write!(f, " -> {}", self.allowed)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("rule {0}: allowed set is empty")]
    EmptyAllowed(String),
    #[error("duplicate rule id {0}")]
    DuplicateId(String),
    #[error("no {0}-gap rules")]
    MissingClass(GapClass),
    #[error("last {0}-gap rule must be a catch-all (`else`)")]
    NoFallback(GapClass),
}

/// Ordered, first-match rule table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintRuleTable {
    rules: Vec<ConstraintRule>,
}

/// Canonical rule set for OR subfamily gap filling.
pub const BUILTIN_RULES: &str = "\
A1  TA_A(A|G)    -> {C}
A2  TA_GA        -> {C}
A3  TA_(T|C)·    -> {C,T}
A4  TG_A(A|G)    -> {C,G}
A5  TG_GA        -> {C,G}
A6  TG_(T|C)·    -> {C,G,T}
A7  ·T_A(C|T)    -> {T,C}
A8  ·T_A(A|G)    -> {C}
A9  ·T_GA        -> {G,C}
A10 ·T_G(C|T|G)  -> {T,C,G}
A11 ·C_A(A|G)    -> {C,G,A}
A12 ·C_GA        -> {C,G,A}
A13 else         -> {A,C,G,T}
B1  TA_          -> {C,T}
B2  TG_          -> {C,T,G}
B3  else         -> {A,C,G,T}
";

impl ConstraintRuleTable {
    pub fn new(rules: Vec<ConstraintRule>) -> Result<Self, RuleError> {
        for (i, rule) in rules.iter().enumerate() {
            if rule.allowed.is_empty() {
                return Err(RuleError::EmptyAllowed(rule.id.clone()));
            }
            if rules[..i].iter().any(|r| r.id == rule.id) {
                return Err(RuleError::DuplicateId(rule.id.clone()));
            }
        }
        for class in [GapClass::Single, GapClass::Multi] {
            match rules.iter().rfind(|r| r.class == class) {
                None => return Err(RuleError::MissingClass(class)),
                Some(r) if !r.pattern.is_catch_all() => return Err(RuleError::NoFallback(class)),
                Some(_) => {}
            }
        }
        Ok(ConstraintRuleTable { rules })
    }

    /// The built-in A1–A13 / B1–B3 table.
    pub fn builtin() -> Self {
        BUILTIN_RULES.parse().expect("built-in rule table is valid")
    }

    pub fn rules(&self) -> &[ConstraintRule] {
        &self.rules
    }

    pub fn get(&self, id: &str) -> Option<&ConstraintRule> {
        self.rules.iter().find(|r| r.id == id)
    }

    /// First rule of `class` matching `ctx`.
    pub fn first_match(&self, ctx: &Context, class: GapClass) -> &ConstraintRule {
        self.rules
            .iter()
            .filter(|r| r.class == class)
            .find(|r| r.pattern.matches(ctx))
            .expect("every class ends with a catch-all rule")
    }
}

impl fmt::Display for ConstraintRuleTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for rule in &self.rules {
            writeln!(f, "{rule}")?;
        }
        Ok(())
    }
}

/// Allowed bases for a gap column and the id of the rule that decided it.
pub fn allowed_set<'t>(
    ctx: &Context,
    class: GapClass,
    table: &'t ConstraintRuleTable,
) -> (BaseSet, &'t str) {
    let rule = table.first_match(ctx, class);
    (rule.allowed, &rule.id)
}

impl FromStr for ConstraintRuleTable {
    type Err = RuleError;

    fn from_str(text: &str) -> Result<Self, RuleError> {
        let mut rules = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            rules.push(parse_rule(line).map_err(|message| RuleError::Syntax {
                line: idx + 1,
                message,
            })?);
        }
        ConstraintRuleTable::new(rules)
    }
}

fn parse_rule(line: &str) -> Result<ConstraintRule, String> {
    let (id, rest) = line
        .split_once(char::is_whitespace)
        .ok_or_else(|| "expected `<id> <pattern> -> {bases}`".to_string())?;
    let class = match id.chars().next() {
        Some('A') => GapClass::Single,
        Some('B') => GapClass::Multi,
        _ => return Err(format!("rule id `{id}` must start with A (single gap) or B (multi gap)")),
    };
    let (pattern_text, allowed_text) = rest
        .split_once("->")
        .or_else(|| rest.split_once('→'))
        .ok_or_else(|| "missing `->`".to_string())?;
    let pattern = parse_pattern(pattern_text.trim())?;
    let allowed = parse_allowed(allowed_text.trim())?;
    Ok(ConstraintRule {
        id: id.to_string(),
        class,
        pattern,
        allowed,
    })
}

fn parse_pattern(text: &str) -> Result<ContextPattern, String> {
    if text == "else" {
        return Ok(ContextPattern::ANY);
    }
    let (left, right) = text
        .split_once('_')
        .ok_or_else(|| format!("pattern `{text}` has no `_` gap marker"))?;
    let left = parse_items(left)?;
    let right = parse_items(right)?;
    let any = PositionPattern::Any;
    let (prev2, prev1) = match left.as_slice() {
        [] => (any, any),
        [p1] => (any, *p1),
        [p2, p1] => (*p2, *p1),
        _ => return Err("at most two positions before `_`".into()),
    };
    let (next1, next2) = match right.as_slice() {
        [] => (any, any),
        [n1] => (*n1, any),
        [n1, n2] => (*n1, *n2),
        _ => return Err("at most two positions after `_`".into()),
    };
    Ok(ContextPattern {
        prev2,
        prev1,
        next1,
        next2,
    })
}

fn parse_items(text: &str) -> Result<Vec<PositionPattern>, String> {
    let mut items = Vec::new();
    let mut chars = text.chars().filter(|c| !c.is_whitespace());
    while let Some(c) = chars.next() {
        match c {
            '·' | '*' => items.push(PositionPattern::Any),
            '~' => items.push(PositionPattern::Unavailable),
            '(' => {
                let mut set = BaseSet::EMPTY;
                loop {
                    match chars.next() {
                        Some(')') => break,
                        Some('|') => {}
                        Some(ch) => set.insert(
                            Base::from_char(ch).ok_or_else(|| format!("invalid base {ch:?}"))?,
                        ),
                        None => return Err("unclosed `(`".into()),
                    }
                }
                if set.is_empty() {
                    return Err("empty base set `()`".into());
                }
                items.push(PositionPattern::OneOf(set));
            }
            ch => items.push(PositionPattern::base(
                Base::from_char(ch).ok_or_else(|| format!("invalid pattern item {ch:?}"))?,
            )),
        }
    }
    Ok(items)
}

fn parse_allowed(text: &str) -> Result<BaseSet, String> {
    let inner = text
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .ok_or_else(|| format!("allowed set `{text}` must be written as {{X,Y}}"))?;
    let mut set = BaseSet::EMPTY;
    for part in inner.split(',') {
        let part = part.trim();
        let mut it = part.chars();
        match (it.next().and_then(Base::from_char), it.next()) {
            (Some(b), None) => set.insert(b),
            _ => return Err(format!("invalid base `{part}` in allowed set")),
        }
    }
    Ok(set)
}
