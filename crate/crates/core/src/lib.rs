//! Generalized resolvents `(A + F)⁻¹ F` of monotone operators on ℝⁿ.
//!
//! The crate covers admissible base operators `F` ([`base`]), set-valued
//! monotone operators ([`monotone`]), resolvent evaluation and the
//! maximality probe ([`resolvent`]), closed-form generalized projectors
//! ([`projector`]), certificates built on resolvents ([`analysis`]), and
//! the constructive extension of F-firmly nonexpansive maps on ℝ
//! ([`extension`]).

pub mod analysis;
pub mod base;
pub mod error;
pub mod extension;
pub mod io;
pub mod monotone;
pub mod point;
pub mod potential;
pub mod projector;
pub mod resolvent;
pub mod solver;
pub mod suite;

pub use base::{FKind, FOperator};
pub use error::{Error, Result};
pub use monotone::{graph_monotonicity_check, GraphSample, MonotoneForm, MonotoneOperator, SetValue};
pub use point::Point;
pub use potential::{BuiltinPotential, Potential};
pub use projector::{ConvexSet, ProjectorSpec};
pub use resolvent::{resolvent_apply, Method, ResolventResult};
