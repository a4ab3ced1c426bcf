//! Constructive extension of F-firmly nonexpansive maps on ℝ through the
//! proximal average of a Fitzpatrick function and its transposed conjugate.

mod extract;
mod fitzpatrick;
mod grid;
mod legendre;
mod pipeline;
mod proximal;

pub use extract::{default_eps, extract_graph, extract_graph_with_adjustment};
pub use fitzpatrick::{fitzpatrick_eval, Fitzpatrick1d};
pub use grid::{Grid, GridFunction};
pub use legendre::{conjugate_2d, legendre_1d, MIN_RESOLUTION};
pub use pipeline::{extend, Diagnostics, ExtendedMap, ExtensionResult, GridParams, DEFAULT_RESOLUTION};
pub use proximal::{proximal_average, proximal_average_direct};
