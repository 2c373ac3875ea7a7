use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl SyntaxError {
    pub fn new(line: usize, col: usize, message: impl Into<String>) -> SyntaxError {
        SyntaxError {
            line,
            col,
            message: message.into(),
        }
    }
}

/// A structural problem found in a model. `context` names the template
/// (or `<global>` / `<system>`) the problem was found in.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Diagnostic {
    pub context: String,
    pub message: String,
}

impl Diagnostic {
    pub fn new(context: impl Into<String>, message: impl Into<String>) -> Diagnostic {
        Diagnostic {
            context: context.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.context, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("duplicate location id `{0}`")]
    DuplicateLocation(String),
    #[error("edge references unknown location `{0}`")]
    DanglingLocation(String),
    #[error("template `{0}` has no initial location")]
    NoInitialLocation(String),
    #[error("duplicate declaration `{0}`")]
    DuplicateDeclaration(String),
    #[error("duplicate template `{0}`")]
    DuplicateTemplate(String),
    #[error("model is not well-formed: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    IllFormed(Vec<Diagnostic>),
}

/// Failure while turning a model into its executable form.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{context}: {message}")]
pub struct CompileError {
    pub context: String,
    pub message: String,
}

impl CompileError {
    pub fn new(context: impl Into<String>, message: impl Into<String>) -> CompileError {
        CompileError {
            context: context.into(),
            message: message.into(),
        }
    }
}

/// Runtime failure while evaluating guards or updates.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("value {value} out of range [{lo}, {hi}] assigned to `{var}`")]
    OutOfRange {
        var: String,
        value: i64,
        lo: i64,
        hi: i64,
    },
    #[error("array index {index} out of bounds (size {size})")]
    IndexOutOfBounds { index: i64, size: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("clock constraint not convex: {0}")]
    NonConvex(String),
    #[error("clock used in a discrete context")]
    ClockInDiscreteContext,
    #[error("function `{0}` did not return a value")]
    MissingReturn(String),
    #[error("loop iteration limit exceeded")]
    LoopLimit,
    #[error("guard or invariant assigns to `{0}`")]
    SideEffect(String),
}
