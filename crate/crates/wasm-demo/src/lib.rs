//! Browser bindings for three interactive views: rotator projections onto
//! the unit ball and the horizontal line, the `T_p x = k_p(x)·x` shrink
//! factor as `p` varies, and the 1-D extension of a sampled map.
//!
//! The `*_impl` functions hold the logic and are tested natively; the
//! exported wrappers only convert errors.

use wasm_bindgen::prelude::*;

use fresolvent::extension::{extend, GridParams};
use fresolvent::resolvent::kp_solve;
use fresolvent::{ConvexSet, FOperator, GraphSample, Point, ProjectorSpec};

fn projector(theta: f64, set: &str) -> Result<ProjectorSpec, String> {
    let f = FOperator::rotator(theta).map_err(|e| e.to_string())?;
    let set = match set {
        "ball" => ConvexSet::Ball { center: Point::zeros(2), radius: 1.0 },
        "line" => ConvexSet::HorizontalLine,
        other => return Err(format!("unknown set {other:?}; expected \"ball\" or \"line\"")),
    };
    ProjectorSpec::new(set, f).map_err(|e| e.to_string())
}

/// Projects interleaved `[x0, y0, x1, y1, ...]` and returns the images in the
/// same layout.
pub fn project_points_impl(theta: f64, set: &str, xy: &[f64]) -> Result<Vec<f64>, String> {
    if !xy.len().is_multiple_of(2) {
        return Err("coordinate list must have even length".into());
    }
    let spec = projector(theta, set)?;
    let mut out = Vec::with_capacity(xy.len());
    for c in xy.chunks_exact(2) {
        let p = spec.project(&Point::new(c.to_vec()).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        out.extend(p.coords().iter());
    }
    Ok(out)
}

/// `k_p` for `p` on a uniform grid over `[p_min, p_max]`, at a point of norm
/// `norm`. Returns `[p0, k0, p1, k1, ...]`.
pub fn kp_curve_impl(norm: f64, p_min: f64, p_max: f64, samples: usize) -> Result<Vec<f64>, String> {
    if !(p_min > 1.0 && p_max > p_min && p_max.is_finite()) {
        return Err("need 1 < p_min < p_max".into());
    }
    if !(norm.is_finite() && norm >= 0.0) || samples < 2 {
        return Err("need a finite norm ≥ 0 and at least two samples".into());
    }
    let x = Point::new(vec![norm]).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(2 * samples);
    for i in 0..samples {
        let p = p_min + (p_max - p_min) * i as f64 / (samples - 1) as f64;
        out.push(p);
        out.push(kp_solve(p, &x));
    }
    Ok(out)
}

/// Extends the sample `[x0, t0, x1, t1, ...]` (with `F = Id`) and evaluates
/// the extension at `queries`. Returns one value per query.
pub fn extend_curve_impl(samples: &[f64], bound: f64, resolution: usize, queries: &[f64]) -> Result<Vec<f64>, String> {
    if samples.is_empty() || !samples.len().is_multiple_of(2) {
        return Err("sample list must hold (x, Tx) pairs".into());
    }
    let pairs: Vec<(f64, f64)> = samples.chunks_exact(2).map(|c| (c[0], c[1])).collect();
    let graph = GraphSample::from_scalars(&pairs).map_err(|e| e.to_string())?;
    let f = FOperator::identity(1).map_err(|e| e.to_string())?;
    let result = extend(&graph, &f, GridParams::new(bound, resolution)).map_err(|e| e.to_string())?;
    queries.iter().map(|&q| result.oracle.query(q).map_err(|e| e.to_string())).collect()
}

#[wasm_bindgen]
pub fn project_points(theta: f64, set: &str, xy: &[f64]) -> Result<Vec<f64>, JsError> {
    project_points_impl(theta, set, xy).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn kp_curve(norm: f64, p_min: f64, p_max: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    kp_curve_impl(norm, p_min, p_max, samples).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn extend_curve(samples: &[f64], bound: f64, resolution: usize, queries: &[f64]) -> Result<Vec<f64>, JsError> {
    extend_curve_impl(samples, bound, resolution, queries).map_err(|e| JsError::new(&e))
}
