use gga_core::{AlgebraError, CatalogError, ReprError, SampleError};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("need at least {need} tail points, have {have}")]
    TooFewExceedances { need: usize, have: usize },
    #[error("tail fraction {0} outside (0, 0.5]")]
    BadTailFraction(f64),
    #[error("insufficient tail mass: {bins} usable bins, need {need}")]
    InsufficientTailMass { bins: usize, need: usize },
    #[error("non-finite input value")]
    NonFinite,
    #[error("node %{0} cannot be sampled: {1}")]
    UnsupportedSampler(usize, CatalogError),
    #[error("operation `{0}` has no forward semantics")]
    UnsupportedOp(String),
    #[error("node %{0} is not in the program")]
    NoSuchNode(usize),
    #[error("no root of the moment equation in (0, {0}]")]
    NoRoot(f64),
    #[error("sample size must be positive")]
    EmptySample,
    #[error(transparent)]
    Representative(#[from] ReprError),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}
