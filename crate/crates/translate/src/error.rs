use creol_syntax::Diagnostic;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("source has errors: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Diagnostic>),
    #[error("abstraction policy: {0}")]
    Policy(String),
    #[error("cannot abstract `{var} := {expr}`: the value depends on a dropped variable")]
    Unabstractable { var: String, expr: String },
    #[error("generated name `{0}` clashes with another declaration")]
    NameClash(String),
    #[error("`{0}` is reserved in the automaton language")]
    Reserved(String),
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error(transparent)]
    Build(#[from] ta_model::BuildError),
    #[error("scheduler: {0}")]
    Scheduler(String),
    #[error(transparent)]
    Interface(#[from] crate::interface::InterfaceError),
    #[error("timing bounds: {0}")]
    Bounds(String),
}
