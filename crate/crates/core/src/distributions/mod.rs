//! Point-supported functionals, Taylor data at the origin, multipliers and the
//! Liouville engine.

pub mod cutoff;
pub mod delta;
pub mod liouville;
pub mod multiplier;
pub mod reconstruct;
pub mod taylor;
pub mod transform;

pub use cutoff::{CutoffSpec, Jet, Window};
pub use delta::{
    hankel_delta, pair_delta, pair_delta_exact, pair_delta_reduced, pair_s_delta_reduced,
    pair_t_combination_reduced, s_to_t_exact, taylor_weight, DeltaCombination, TestFunction,
};
pub use liouville::{
    default_family, liouville_solve, liouville_solve_with, negative_control, test_family,
    weak_spectral_check, Certificate, LiouvilleSolution, WeakCheck,
};
pub use multiplier::{multiplier_check, Multiplier, MultiplierOptions, MultiplierReport};
pub use reconstruct::reconstruct_point_supported;
pub use taylor::{taylor_coeffs, TaylorReport};
pub use transform::{pair_delta_transform, TransformPairing};
