//! Constraint-driven filling of star-model gaps from an L-system stream.

mod fill;
mod rules;
mod validate;

pub use fill::{fill, FillError, FillEvent, FillPolicy, FillTrace, MismatchHandling};
pub use rules::{
    allowed_set, ConstraintRule, ConstraintRuleTable, Context, ContextPattern, GapClass, PositionPattern,
    RuleError, BUILTIN_RULES,
};
pub use validate::{validate_stream_usage, validate_trace, Violation, ViolationKind};
