//! Continued-fraction measures with Fourier decay.
//!
//! Exact continuant arithmetic, the block measure `ν`, the mass distribution
//! `λ` that forces long exceptional runs of partial quotients, Fourier
//! estimates with rigorous error bounds, and checkers for the inequalities
//! the construction relies on.

pub mod assignment;
pub mod budget;
pub mod cf;
pub mod error;
pub mod fourier;
pub mod kaufman;
pub mod lambda;
pub mod profile;
pub mod schedule;
pub mod verify;

pub use assignment::{AssignmentRule, PsiFamily, RunCount};
pub use cf::{ContinuantPair, CylinderInterval, ExactRat, LogFloat, Word};
pub use error::{Error, Result};
pub use fourier::{
    decay_scan, fourier_cylinder_sum, fourier_monte_carlo, DecayTable, FourierEstimate, Method,
    ProductMeasure,
};
pub use fourier::audit::{exponent_audit, ExponentAudit};
pub use kaufman::{build_nu, FrostmanScan, NuMeasure, TopHalfSplit};
pub use lambda::{LambdaConfig, LambdaMeasure, TypExcSplit};
pub use profile::Profile;
pub use schedule::{make_schedule_psi, Schedule, WeightTable};
