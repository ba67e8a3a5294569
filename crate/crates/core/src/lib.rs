//! Transient response of a viscoelastic rod carrying a tip body.
//!
//! The rod obeys a distributed-order fractional constitutive law, captured
//! entirely by the quotient `M(s)`. Displacement and stress follow from the
//! kernels `P(x, t)` and `σ_H(x, t)`, each a branch-cut integral plus a
//! residue series over the vibration modes.

pub mod cli;
pub mod constitutive;
pub mod error;
pub mod forcing;
pub mod kernels;
pub mod modes;
pub mod oracle;
pub mod quadrature;

pub use constitutive::{check_assumptions, AssumptionReport, ConstitutiveModel, CutSide, ModelLimits};
pub use error::{Error, Result};
pub use forcing::{compose_sigma, compose_u, eval_f, ForcingSignal};
pub use kernels::{
    calibrate_cut_sides, elastic_p, elastic_sigma_h, elastic_sigma_series, ElasticSeries, Flags,
    KernelKind, KernelSpec, KernelValue, QuadratureConfig,
};
pub use modes::{count_zeros_in_disc, eval_f as eval_characteristic, find_frequencies, lift_to_pole, Mode, ModeSet};
pub use oracle::{invert, oracle_p, oracle_sigma_h, BromwichConfig, Inversion};
