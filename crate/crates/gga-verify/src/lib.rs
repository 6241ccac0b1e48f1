//! Forward sampling of lowered programs and the estimators and numeric
//! oracles used to check predicted tail classes against simulation.

pub mod error;
pub mod forward;
pub mod hill;
pub mod khat;
pub mod lognormal;
pub mod mc;
pub mod oracles;
pub mod proposal;
pub mod quad;
pub mod sgd;
pub mod slope;

pub use error::VerifyError;
pub use forward::{forward_sample, forward_sample_many, forward_sample_threads};
pub use hill::{hill_alpha, power_law_check, PowerLawCheck, PowerVerdict, TailEstimate};
pub use khat::{khat_verdict, pareto_khat, KhatVerdict, KHAT_FAIL, KHAT_PASS};
pub use mc::{mc_verify, mc_verify_nodes, verify_samples, Budget, NodeVerification, Thresholds, Verdict, VerifyReport};
pub use sgd::{sgd_alpha_oracle, sgd_class, sgd_program, sgd_simulate, SgdRun};
pub use slope::{gengamma_slope, loglog_slope, tail_density, DensityPoint, LogLogFit};
