use gga_core::CatalogError;
use thiserror::Error;

use crate::ast::Span;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ParseError {
    #[error("{span}: syntax error: {msg}")]
    Syntax { msg: String, span: Span },
    #[error("{span}: unknown distribution `{name}`")]
    UnknownDistribution { name: String, span: Span },
    #[error("{span}: unknown function `{name}`")]
    UnknownFunction { name: String, span: Span },
    #[error("{span}: `{name}` takes {expected} argument(s), got {got}")]
    Arity { name: String, expected: String, got: usize, span: Span },
    #[error("{span}: exponent must be a constant expression")]
    StochasticExponent { span: Span },
}

impl ParseError {
    pub fn span(&self) -> Span {
        match self {
            ParseError::Syntax { span, .. }
            | ParseError::UnknownDistribution { span, .. }
            | ParseError::UnknownFunction { span, .. }
            | ParseError::Arity { span, .. }
            | ParseError::StochasticExponent { span } => *span,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum LowerError {
    #[error("{span}: undefined variable `{name}`")]
    Undefined { name: String, span: Span },
    #[error("{span}: `{name}` is used before its definition (cycle)")]
    Cycle { name: String, span: Span },
    #[error("{span}: `{name}` is already defined")]
    Redefined { name: String, span: Span },
    #[error("{span}: iid count must be an integer >= 1, got {value}")]
    IidCount { value: f64, span: Span },
    #[error("{span}: iid body may not refer to random variable `{name}`")]
    IidCapture { name: String, span: Span },
    #[error("{span}: {what} must be a constant expression")]
    NonConstant { what: &'static str, span: Span },
    #[error("{span}: division by zero")]
    DivisionByZero { span: Span },
    #[error("{span}: {what} of constant {value} is undefined")]
    Domain { what: &'static str, value: f64, span: Span },
    #[error("{span}: {source}")]
    Catalog { source: CatalogError, span: Span },
    #[error("{span}: {what} needs at least one random operand")]
    NoRandomOperand { what: &'static str, span: Span },
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum FrontendError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Lower(#[from] LowerError),
}

impl LowerError {
    pub fn span(&self) -> Span {
        match self {
            LowerError::Undefined { span, .. }
            | LowerError::Cycle { span, .. }
            | LowerError::Redefined { span, .. }
            | LowerError::IidCount { span, .. }
            | LowerError::IidCapture { span, .. }
            | LowerError::NonConstant { span, .. }
            | LowerError::DivisionByZero { span }
            | LowerError::Domain { span, .. }
            | LowerError::Catalog { span, .. }
            | LowerError::NoRandomOperand { span, .. } => *span,
        }
    }
}

impl FrontendError {
    pub fn span(&self) -> Span {
        match self {
            FrontendError::Parse(e) => e.span(),
            FrontendError::Lower(e) => e.span(),
        }
    }
}
