//! Tail classes of random variables and the algebra that propagates them
//! through arithmetic, plus the distribution catalog and the samplers used to
//! check predictions empirically.

pub mod algebra;
pub mod catalog;
pub mod representative;
pub mod rng;
pub mod sampling;
pub mod scalar;
pub mod special;
pub mod tail;

pub use algebra::{AlgebraError, Algebra, Caveat, Tagged};
pub use catalog::{AtomicDistribution, CatalogError, Family};
pub use representative::{
    is_stand_in, powerlaw_alpha, representative, PowerLawRule, ReprError, RepresentativeConfig, RepresentativeSpec,
};
pub use rng::{Provenance, RngStream, Sample};
pub use sampling::{sample_gen_gamma, sample_representative, RepresentativeSampler, SampleError, SplicedTail};
pub use scalar::Scalar;
pub use tail::{compare, max_class, Heaviness, TailClass};

pub type TailClass64 = TailClass<f64>;
pub type TailClass32 = TailClass<f32>;
pub type Algebra64 = Algebra<f64>;
pub type RepresentativeConfig64 = RepresentativeConfig<f64>;
pub type RepresentativeSpec64 = RepresentativeSpec<f64>;
