//! A small modelling language whose programs lower to a DAG of draws and
//! elementary operations, plus the forward tail-class pass over that DAG and
//! backward posterior tail queries.

pub mod analyze;
pub mod ast;
pub mod error;
pub mod graph;
pub mod independence;
pub mod lexer;
pub mod lower;
pub mod parser;
pub mod posterior;
pub mod print;
pub mod report;

pub use analyze::{analyze, analyze_in_order, Analysis, Analyzer, NodeOutcome};
pub use ast::{Model, Span};
pub use error::{FrontendError, LowerError, ParseError};
pub use graph::{BitSet, Node, NodeId, NodeKind, OpCode, ProgramGraph};
pub use independence::{check_independence, IndependenceWarning};
pub use lower::{compile, lower};
pub use parser::parse;
pub use report::{ReportEntry, TailReport, Warning};
