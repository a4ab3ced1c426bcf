use serde::Serialize;

use crate::analysis::{firm_implies_monotone_check, reconstruct_at};
use crate::base::FOperator;
use crate::error::{Error, Result, Stage};
use crate::extension::extract::{default_eps, extract_graph_with_adjustment};
use crate::extension::fitzpatrick::Fitzpatrick1d;
use crate::extension::grid::{Grid, GridFunction};
use crate::extension::legendre::conjugate_2d;
use crate::extension::proximal::proximal_average;
use crate::monotone::{graph_monotonicity_check, GraphSample};
use crate::point::Point;

pub const DEFAULT_RESOLUTION: usize = 257;

/// Grid settings; unset fields take their defaults (`B = 4·max|coord|`
/// over the reconstructed graph, `eps = 5h²`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridParams {
    pub bound: Option<f64>,
    pub resolution: usize,
    pub eps: Option<f64>,
}

impl Default for GridParams {
    fn default() -> Self {
        GridParams { bound: None, resolution: DEFAULT_RESOLUTION, eps: None }
    }
}

impl GridParams {
    pub fn new(bound: f64, resolution: usize) -> Self {
        GridParams { bound: Some(bound), resolution, eps: None }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Diagnostics {
    pub bound: f64,
    pub resolution: usize,
    pub spacing: f64,
    pub eps: f64,
    pub extracted_points: usize,
    pub extracted_monotone: bool,
    /// Largest `x*` change made to restore monotone order after refinement.
    pub isotonic_adjustment: f64,
    /// Max over the input base points of `|T̃x − Tx|`.
    pub max_agreement_error: f64,
}

/// `T̃` as a 1-D search on the grid representation of `Ψ`.
#[derive(Debug, Clone)]
pub struct ExtendedMap {
    psi: GridFunction,
    f: FOperator,
}

const GOLDEN_ITERS: usize = 80;

impl ExtendedMap {
    pub fn psi(&self) -> &GridFunction {
        &self.psi
    }

    /// `Ψ(u, Fx − Fu) − u·(Fx − Fu)`, `None` off the grid.
    fn gap(&self, fx: f64, u: f64) -> Option<f64> {
        let fu = self.f.apply(&Point::from_vector(nalgebra::DVector::from_element(1, u))).ok()?;
        let v = fx - fu.coords()[0];
        Some(self.psi.interpolate(u, v)? - u * v)
    }

    /// `T̃x` together with the residual gap at the returned point.
    pub fn query_with_gap(&self, x: f64) -> Result<(f64, f64)> {
        if !x.is_finite() {
            return Err(Error::NonFinite("query point").at(Stage::Query));
        }
        let fx = self.f.apply(&Point::from_vector(nalgebra::DVector::from_element(1, x)))?.coords()[0];
        let grid = self.psi.grid();
        let us = grid.coordinates();
        let mut best: Option<(usize, f64)> = None;
        for (k, &u) in us.iter().enumerate() {
            if let Some(g) = self.gap(fx, u) {
                if best.is_none_or(|(_, b)| g < b) {
                    best = Some((k, g));
                }
            }
        }
        let (k, g_k) = best.ok_or_else(|| Error::NoSolution.at(Stage::Query))?;
        let feasible = |i: usize| self.gap(fx, us[i]).is_some();
        let lo = if k > 0 && feasible(k - 1) { us[k - 1] } else { us[k] };
        let hi = if k + 1 < us.len() && feasible(k + 1) { us[k + 1] } else { us[k] };
        let objective = |u: f64| self.gap(fx, u).unwrap_or(f64::INFINITY);
        let (u, g) = golden_section(objective, lo, hi);
        Ok(if g <= g_k { (u, g) } else { (us[k], g_k) })
    }

    pub fn query(&self, x: f64) -> Result<f64> {
        Ok(self.query_with_gap(x)?.0)
    }

    pub fn apply(&self, x: &Point) -> Result<Point> {
        x.ensure_dim(1)?;
        Ok(Point::from_vector(nalgebra::DVector::from_element(1, self.query(x.coords()[0])?)))
    }
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..GOLDEN_ITERS {
        if b - a <= f64::EPSILON * a.abs().max(b.abs()).max(1.0) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd { (c, fc) } else { (d, fd) }
}

#[derive(Debug, Clone)]
pub struct ExtensionResult {
    pub extended_graph: GraphSample,
    pub oracle: ExtendedMap,
    pub diagnostics: Diagnostics,
}

/// Extends an F-firmly nonexpansive sample `{(x, Tx)}` on ℝ to all of ℝ.
///
/// Stages: reconstruct `A_T`, grid its Fitzpatrick function `Φ`, take
/// `Φ*ᵀ`, form the proximal average `Ψ`, read off `gra Ã` where `Ψ` meets
/// the pairing, and answer queries of `T̃ = (Ã + F)⁻¹F` on `Ψ`. Errors are
/// tagged with the failing stage.
pub fn extend(t_graph: &GraphSample, f: &FOperator, params: GridParams) -> Result<ExtensionResult> {
    if t_graph.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: t_graph.dim() }.at(Stage::Precondition));
    }
    if f.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: f.dim() }.at(Stage::Precondition));
    }
    let pre = firm_implies_monotone_check(t_graph, f).map_err(|e| e.at(Stage::Precondition))?;
    if !pre.firmness.passing {
        return Err(Error::NotAdmissible(format!(
            "sample is not F-firmly nonexpansive (worst violation {:e})",
            pre.firmness.worst_violation
        ))
        .at(Stage::Precondition));
    }

    let a_graph = reconstruct_at(t_graph, f).map_err(|e| e.at(Stage::Reconstruct))?;
    let fitz = Fitzpatrick1d::new(&a_graph).map_err(|e| e.at(Stage::Fitzpatrick))?;
    let bound = match params.bound {
        Some(b) => b,
        None => {
            let m = fitz.max_abs_coordinate();
            if m > 0.0 { 4.0 * m } else { 1.0 }
        }
    };
    let grid = Grid::new(bound, params.resolution).map_err(|e| e.at(Stage::Fitzpatrick))?;
    let eps = params.eps.unwrap_or_else(|| default_eps(grid.spacing()));
    let phi = GridFunction::from_fn(grid, |x, y| fitz.eval(x, y)).map_err(|e| e.at(Stage::Fitzpatrick))?;

    let phi_star_t = conjugate_2d(&phi).map_err(|e| e.at(Stage::Conjugate))?;
    let psi = proximal_average(&phi, &phi_star_t).map_err(|e| e.at(Stage::ProximalAverage))?;
    let (extended_graph, isotonic_adjustment) =
        extract_graph_with_adjustment(&psi, eps).map_err(|e| e.at(Stage::Extract))?;
    let extracted_monotone = graph_monotonicity_check(&extended_graph).is_monotone;

    let oracle = ExtendedMap { psi, f: f.clone() };
    let mut max_agreement_error: f64 = 0.0;
    for (x, tx) in t_graph.pairs() {
        let y = oracle.query(x.coords()[0])?;
        max_agreement_error = max_agreement_error.max((y - tx.coords()[0]).abs());
    }

    let diagnostics = Diagnostics {
        bound,
        resolution: grid.resolution,
        spacing: grid.spacing(),
        eps,
        extracted_points: extended_graph.len(),
        extracted_monotone,
        isotonic_adjustment,
        max_agreement_error,
    };
    Ok(ExtensionResult { extended_graph, oracle, diagnostics })
}
