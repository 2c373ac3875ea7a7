//! Frontend for a real-time subset of Creol: lexing, parsing with timing
//! annotations taken from comments, validation and printing.

pub mod annotation;
pub mod ast;
pub mod error;
pub mod lexer;
pub mod parser;
pub mod printer;
pub mod validate;

pub use annotation::extract_annotation;
pub use ast::*;
pub use error::{AnnotationError, Diagnostic, Severity, SyntaxError};
pub use parser::{parse_expr, parse_guard, parse_model};
pub use printer::print_model;
pub use validate::{validate, zero_time_releases};
