//! Bessel coupling map, its inversion, perfect-transfer schedule synthesis
//! and simplex refinement.

mod bessel;
mod map;
mod nelder_mead;
mod refine;

pub use bessel::{bessel_j, bessel_j0, bessel_j1, BESSEL_MAX_ARGUMENT, J1_ARGMAX, J1_MAX};
pub use map::{
    effective_coupling, feasibility_report, invert_link, synthesize_schedule, CouplingTarget, LinkFeasibility,
};
pub use nelder_mead::{nelder_mead, NelderMeadOptions, NelderMeadResult};
pub use refine::{refine_schedule, RefineBounds, Refinement, TracePoint};
