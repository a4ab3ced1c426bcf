//! The F-resolvent `T_A = (A + F)⁻¹ F`.
//!
//! Closed forms are used whenever one is known; otherwise a single-valued
//! `A` is handled by solving `A y + F y − F x = 0` numerically.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::base::{FKind, FOperator};
use crate::error::{Error, Result};
use crate::monotone::{MonotoneForm, MonotoneOperator};
use crate::point::{scaled_tol, Point};
use crate::projector::{ConvexSet, ProjectorSpec};
use crate::solver::{self, SolverOptions};

pub use crate::solver::Method;

#[derive(Debug, Clone, Serialize)]
pub struct ResolventResult {
    pub input: Point,
    pub output: Point,
    /// `‖Fx − (A + F)(output)‖`; zero for closed forms.
    pub residual: f64,
    pub method: Method,
    pub iterations: usize,
}

impl ResolventResult {
    fn closed(input: &Point, output: Point) -> Self {
        ResolventResult {
            input: input.clone(),
            output,
            residual: 0.0,
            method: Method::ClosedForm,
            iterations: 0,
        }
    }
}

fn check_dims(a: &MonotoneOperator, f: &FOperator, x: &Point) -> Result<()> {
    if a.dim() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: a.dim() });
    }
    x.ensure_dim(f.dim())
}

/// `½[[1, −s], [s, 1]]` with `s = sin θ / (1 + cos θ)`: the
/// `R(θ)`-resolvent of the identity.
pub fn rotator_resolvent_matrix(theta: f64) -> nalgebra::DMatrix<f64> {
    let s = theta.sin() / (1.0 + theta.cos());
    nalgebra::DMatrix::from_row_slice(2, 2, &[0.5, -0.5 * s, 0.5 * s, 0.5])
}

/// Evaluates `T_A x`.
pub fn resolvent_apply(a: &MonotoneOperator, f: &FOperator, x: &Point) -> Result<ResolventResult> {
    check_dims(a, f, x)?;
    match (a.form(), f.kind()) {
        (MonotoneForm::Zero | MonotoneForm::NormalConeWholeSpace, _) => {
            return Ok(ResolventResult::closed(x, x.clone()));
        }
        (MonotoneForm::Identity, FKind::Rotator { theta }) => {
            let y = rotator_resolvent_matrix(*theta) * x.as_vector();
            return Ok(ResolventResult::closed(x, Point::checked(y, "T_A x")?));
        }
        (MonotoneForm::Identity, FKind::PNormGradient { p }) => {
            let k = kp_solve(*p, x);
            return Ok(ResolventResult::closed(x, x * k));
        }
        (MonotoneForm::NormalConePoint(c), _) => {
            let spec = ProjectorSpec::new(ConvexSet::SinglePoint(c.clone()), f.clone())?;
            return Ok(ResolventResult::closed(x, spec.project(x)?));
        }
        (MonotoneForm::NormalConeLine, _) => {
            let spec = ProjectorSpec::new(ConvexSet::HorizontalLine, f.clone())?;
            return Ok(ResolventResult::closed(x, spec.project(x)?));
        }
        (MonotoneForm::NormalConeBall { center, radius }, _) => {
            let spec = ProjectorSpec::new(
                ConvexSet::Ball { center: center.clone(), radius: *radius },
                f.clone(),
            )?;
            return Ok(ResolventResult::closed(x, spec.project(x)?));
        }
        (MonotoneForm::FromGraph(g), _) => {
            let fx = f.apply(x)?;
            let tol = scaled_tol(fx.norm());
            for (u, us) in g.pairs() {
                let lhs = us + &f.apply(u)?;
                if lhs.distance(&fx) <= tol {
                    return Ok(ResolventResult::closed(x, u.clone()));
                }
            }
            return Err(Error::UnknownDomain);
        }
        _ => {}
    }
    if let (Some(ma), Some(mf)) = (a.matrix(), f.matrix()) {
        let rhs = &mf * x.as_vector();
        let y = (ma + mf)
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::InternalConsistency("A + F is singular".into()))?;
        return Ok(ResolventResult::closed(x, Point::checked(y, "T_A x")?));
    }
    resolvent_numeric(a, f, x, &SolverOptions::default())
}

/// Solves `A y + F y = F x` numerically for single-valued `A`, bypassing
/// closed forms. Starts from `y₀ = x`.
pub fn resolvent_numeric(
    a: &MonotoneOperator,
    f: &FOperator,
    x: &Point,
    opts: &SolverOptions,
) -> Result<ResolventResult> {
    check_dims(a, f, x)?;
    if !a.is_single_valued() {
        return Err(Error::Unsupported(
            "numeric resolvent needs a single-valued continuous A".into(),
        ));
    }
    let fx = f.apply(x)?.into_vector();
    let g = |y: &DVector<f64>| -> DVector<f64> {
        match a.single_valued(y) {
            Some(ay) => ay + f.apply_vec(y) - &fx,
            None => DVector::from_element(y.len(), f64::NAN),
        }
    };
    let (lambda_a, lip_a) = a.constants();
    let lambda = lambda_a + f.strong_monotonicity_modulus();
    let tau = match (lip_a, f.operator_norm()) {
        (Some(la), Some(lf)) if lambda > 0.0 && la + lf > 0.0 => {
            Some(lambda / ((la + lf) * (la + lf)))
        }
        _ => None,
    };
    let sol = solver::solve(g, x.as_vector().clone(), fx.norm(), tau, opts)?;
    Ok(ResolventResult {
        input: x.clone(),
        output: Point::checked(sol.y, "T_A x")?,
        residual: sol.residual,
        method: sol.method,
        iterations: sol.iterations,
    })
}

/// Checks `Fx − Fy ∈ A y`, the defining relation of `y = T_A x`.
pub fn satisfies_resolvent_relation(
    a: &MonotoneOperator,
    f: &FOperator,
    x: &Point,
    y: &Point,
) -> Result<bool> {
    let d = &f.apply(x)? - &f.apply(y)?;
    let set = match a.eval(y) {
        Ok(s) => s,
        Err(Error::NotInSample) => return Ok(false),
        Err(e) => return Err(e),
    };
    let scale = f.apply(x)?.norm().max(d.norm()).max(1.0);
    Ok(set.contains_tol(&d, 1e-9 * scale))
}

/// The root in `[0, 1)` of `k^(p−1) + k/‖x‖^(p−2) = 1`, with `k = 0` at
/// `x = 0`. Bisection to floating-point resolution.
pub fn kp_solve(p: f64, x: &Point) -> f64 {
    let n = x.norm();
    if n == 0.0 {
        return 0.0;
    }
    let damp = n.powf(2.0 - p);
    let phi = |k: f64| k.powf(p - 1.0) + k * damp - 1.0;
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = phi(mid);
        if v == 0.0 {
            return mid;
        }
        // NaN (from ∞·0 style overflow) counts as positive: φ grows with k.
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if phi(lo).abs() <= phi(hi).abs() {
        lo
    } else {
        hi
    }
}

/// `φ(k) = k^(p−1) + k/‖x‖^(p−2) − 1`.
pub fn kp_residual(p: f64, x: &Point, k: f64) -> f64 {
    k.powf(p - 1.0) + k * x.norm().powf(2.0 - p) - 1.0
}

#[derive(Debug, Clone, Serialize)]
pub struct KpLimitReport {
    pub limit_p_to_1: Point,
    pub limit_p_to_inf: Point,
    pub near_one_ok: bool,
    pub large_p_ok: bool,
}

impl KpLimitReport {
    pub fn passed(&self) -> bool {
        self.near_one_ok && self.large_p_ok
    }
}

pub const KP_NEAR_ONE: f64 = 1.0 + 1e-3;
pub const KP_LARGE: f64 = 1e3;

/// Evaluates `T_p x = k_p(x) x` near both ends of `p ∈ (1, ∞)`.
pub fn kp_limit_check(x: &Point) -> KpLimitReport {
    let near_one = x * kp_solve(KP_NEAR_ONE, x);
    let large = x * kp_solve(KP_LARGE, x);
    let expected_large = if x.norm() < 1.0 { Point::zeros(x.dim()) } else { x.clone() };
    KpLimitReport {
        near_one_ok: near_one.norm() <= 1e-2,
        large_p_ok: large.distance(&expected_large) <= 1e-2,
        limit_p_to_1: near_one,
        limit_p_to_inf: large,
    }
}

/// `x = T_A x` and `0 ∈ Ax`, computed independently; they must agree.
pub fn fixed_point_is_zero_check(a: &MonotoneOperator, f: &FOperator, x: &Point) -> Result<bool> {
    let y = resolvent_apply(a, f, x)?.output;
    let fixed = y.distance(x) <= 1e3 * scaled_tol(x.norm());
    let zero = a.eval(x)?.contains(&Point::zeros(x.dim()));
    if fixed != zero {
        return Err(Error::InternalConsistency(format!(
            "at {x}: fixed point = {fixed} but 0 ∈ Ax = {zero}"
        )));
    }
    Ok(fixed)
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub num_targets: usize,
    pub success_rate: f64,
    pub failures: Vec<Point>,
}

/// Uniform sample from the closed ball of radius `radius` in ℝⁿ.
pub(crate) fn uniform_in_ball(rng: &mut ChaCha8Rng, dim: usize, radius: f64) -> Point {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let p = Point::from_vector(DVector::from_vec(v));
        if p.norm() <= 1.0 {
            return &p * radius;
        }
    }
}

/// One-sided numerical test of `ran(A + F) = ℝⁿ`: draws targets `w` in a
/// ball and tries to solve `w ∈ (A + F) y`. A failure certifies
/// non-maximality at probe resolution; full success is only evidence.
///
/// For sampled operators a target counts as reached when it lies within
/// half the largest nearest-neighbour gap of the sampled range values.
pub fn maximality_probe(
    a: &MonotoneOperator,
    f: &FOperator,
    num_targets: usize,
    radius: f64,
    seed: u64,
) -> Result<ProbeReport> {
    if a.dim() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: a.dim() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = f.dim();

    let sampled_range = match a.form() {
        MonotoneForm::FromGraph(g) => {
            let values = g
                .pairs()
                .iter()
                .map(|(u, us)| Ok(us + &f.apply(u)?))
                .collect::<Result<Vec<Point>>>()?;
            let gap = values
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    values
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != i)
                        .map(|(_, s)| r.distance(s))
                        .fold(f64::INFINITY, f64::min)
                })
                .filter(|d| d.is_finite())
                .fold(0.0, f64::max);
            Some((values, 0.5 * gap))
        }
        _ => None,
    };

    let mut failures = Vec::new();
    for _ in 0..num_targets {
        let w = uniform_in_ball(&mut rng, dim, radius);
        let solved = match &sampled_range {
            Some((values, reach)) => {
                let d = values.iter().map(|r| r.distance(&w)).fold(f64::INFINITY, f64::min);
                d <= reach + scaled_tol(w.norm())
            }
            None => {
                let x = f.inverse(&w)?;
                match resolvent_apply(a, f, &x) {
                    Ok(r) => satisfies_resolvent_relation(a, f, &x, &r.output)?,
                    Err(_) => false,
                }
            }
        };
        if !solved {
            failures.push(w);
        }
    }
    let success_rate = if num_targets == 0 {
        1.0
    } else {
        (num_targets - failures.len()) as f64 / num_targets as f64
    };
    Ok(ProbeReport { num_targets, success_rate, failures })
}
