//! Textual queries: `reach <name>`, `reach line <method:line>`,
//! `reach state <expr>` and `invariant not <target>`, where `<name>` is
//! `Error` or `instance.location` and `<expr>` is an automaton expression
//! over global variables and locations.

use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Target {
    /// The scheduler's error location.
    Error,
    Location {
        instance: String,
        location: String,
    },
    /// Any location of a method automaton that stems from a source line.
    Line {
        method: String,
        line: usize,
    },
    /// Any state satisfying a predicate, kept as source text.
    State(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QueryKind {
    /// Holds when the target is reachable.
    Reach,
    /// Holds when the target is unreachable.
    InvariantNot,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Query {
    pub kind: QueryKind,
    pub target: Target,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("bad query `{text}`: {reason}")]
pub struct QueryError {
    pub text: String,
    pub reason: String,
}

impl Query {
    pub fn reach(target: Target) -> Query {
        Query {
            kind: QueryKind::Reach,
            target,
        }
    }

    /// Whether a reachability answer makes the query hold.
    pub fn holds_if_reachable(&self) -> bool {
        self.kind == QueryKind::Reach
    }
}

fn parse_name(name: &str) -> Option<Target> {
    if name == "Error" {
        return Some(Target::Error);
    }
    let (instance, location) = name.split_once('.')?;
    let ident = |s: &str| !s.is_empty() && s.chars().all(|c| c.is_alphanumeric() || c == '_');
    (ident(instance) && ident(location)).then(|| Target::Location {
        instance: instance.to_string(),
        location: location.to_string(),
    })
}

impl FromStr for Query {
    type Err = QueryError;

    fn from_str(text: &str) -> Result<Query, QueryError> {
        let bad = |reason: &str| QueryError {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let words: Vec<&str> = text.split_whitespace().collect();
        let (kind, rest) = match words.as_slice() {
            ["reach", rest @ ..] => (QueryKind::Reach, rest),
            ["invariant", "not", rest @ ..] => (QueryKind::InvariantNot, rest),
            _ => return Err(bad("expected `reach` or `invariant not`")),
        };
        let target = match rest {
            ["state", expr @ ..] if !expr.is_empty() => {
                let expr = expr.join(" ");
                ta_model::parser::parse_expr(&expr).map_err(|e| bad(&e.to_string()))?;
                Target::State(expr)
            }
            ["line", spec] => {
                let (method, line) = spec
                    .split_once(':')
                    .ok_or_else(|| bad("expected `method:line`"))?;
                let line = line.parse().map_err(|_| bad("line is not a number"))?;
                if method.is_empty() {
                    return Err(bad("missing method name"));
                }
                Target::Line {
                    method: method.to_string(),
                    line,
                }
            }
            [name] => {
                parse_name(name).ok_or_else(|| bad("expected `Error` or `instance.location`"))?
            }
            _ => return Err(bad("expected one target")),
        };
        Ok(Query { kind, target })
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Error => f.write_str("Error"),
            Target::Location { instance, location } => write!(f, "{instance}.{location}"),
            Target::Line { method, line } => write!(f, "line {method}:{line}"),
            Target::State(expr) => write!(f, "state {expr}"),
        }
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            QueryKind::Reach => write!(f, "reach {}", self.target),
            QueryKind::InvariantNot => write!(f, "invariant not {}", self.target),
        }
    }
}
