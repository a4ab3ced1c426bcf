//! Certificates and constructions built on top of resolvents.

mod bregman;
mod firmness;
mod inverse;
mod iterate;
mod minty;
mod reconstruct;

pub use bregman::{bregman_distance, dfirm_identity_check, DFirmReport};
pub use firmness::{
    firmness_check, firmness_check_tol, random_pairs, FirmnessReport, DEFAULT_PAIRS,
};
pub use inverse::{
    inverse_resolvent_fixed_point_check, inverse_resolvent_linear, FixedPointReport,
};
pub use iterate::{contraction_bound, contraction_iterate, resolvent_iterate, IterationTrace};
pub use minty::{minty_forward, minty_inverse, MintyPair};
pub use reconstruct::{
    firm_implies_monotone_check, reconstruct_at, sample_map, ImplicationReport,
};
