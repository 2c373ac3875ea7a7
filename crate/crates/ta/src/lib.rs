//! Timed-automata networks in the style of UPPAAL: an expression and
//! declaration language, templates and systems, a textual format, and the
//! lowering and zone machinery used by the analyzer.

pub mod builder;
pub mod compile;
pub mod dbm;
pub mod determinism;
pub mod error;
pub mod eval;
pub mod expr;
pub mod lexer;
pub mod model;
pub mod parser;
pub mod wellformed;
pub mod xta;

pub use builder::{SystemBuilder, TemplateBuilder};
pub use compile::{compile, CompiledSystem};
pub use dbm::{Constraint, Dbm};
pub use determinism::{check_deterministic, Witness};
pub use error::{BuildError, CompileError, Diagnostic, EvalError, SyntaxError};
pub use expr::{
    AssignOp, BaseType, BinOp, Decl, Declarations, Expr, FuncDecl, Initializer, Param, Stmt, Type,
    TypePrefix, UnOp, VarDecl,
};
pub use model::{
    ClockAtom, ClockConstraint, Direction, Edge, Instance, Location, Relation, Sync, SystemModel,
    Template, Urgency,
};
pub use parser::{parse_declarations, parse_expr, parse_sync, parse_xta, XtaFile};
pub use wellformed::well_formed;
