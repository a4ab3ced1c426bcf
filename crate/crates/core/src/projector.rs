//! Generalized projectors: `P_C = (N_C + F)⁻¹ F`, the F-resolvent of the
//! normal cone of a closed convex set.
//!
//! Line and ball projectors have closed forms for the planar rotator
//! `F = R(θ)`. Balls with arbitrary center and radius are handled by
//! conjugating the unit-ball formula with `u ↦ (u − center)/radius`; this
//! is valid because a linear `F` commutes with that affine change of
//! variables up to a positive factor, which the normal cone absorbs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::base::{FKind, FOperator};
use crate::error::{Error, Result};
use crate::monotone::MonotoneOperator;
use crate::point::{scaled_tol, Point};

/// Branch tolerance for `‖x‖ ≤ 1` in the ball formula.
pub const BALL_BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum ConvexSet {
    SinglePoint(Point),
    WholeSpace,
    /// ℝ × {0} ⊂ ℝ².
    HorizontalLine,
    Ball { center: Point, radius: f64 },
}

#[derive(Debug, Clone)]
pub struct ProjectorSpec {
    set: ConvexSet,
    f: FOperator,
}

/// The rotation angle of `F` if it acts as a planar rotator.
pub fn rotator_angle(f: &FOperator) -> Option<f64> {
    if f.dim() != 2 {
        return None;
    }
    match f.kind() {
        FKind::Rotator { theta } => Some(*theta),
        FKind::Identity => Some(0.0),
        FKind::PNormGradient { p } if *p == 2.0 => Some(0.0),
        _ => None,
    }
}

/// `α = √(‖x‖² − sin²θ) − cos θ`, for `‖x‖ > 1`.
pub fn ball_alpha(theta: f64, norm: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    (norm * norm - s * s).sqrt() - c
}

impl ProjectorSpec {
    pub fn new(set: ConvexSet, f: FOperator) -> Result<Self> {
        match &set {
            ConvexSet::SinglePoint(c) => c.ensure_dim(f.dim())?,
            ConvexSet::WholeSpace => {}
            ConvexSet::HorizontalLine | ConvexSet::Ball { .. } => {
                if rotator_angle(&f).is_none() {
                    return Err(Error::Unsupported(
                        "line and ball projectors need a planar rotator F".into(),
                    ));
                }
                if let ConvexSet::Ball { center, radius } = &set {
                    center.ensure_dim(2)?;
                    if !(radius.is_finite() && *radius > 0.0) {
                        return Err(Error::InvalidParameter(format!(
                            "ball radius {radius} must be positive"
                        )));
                    }
                }
            }
        }
        Ok(ProjectorSpec { set, f })
    }

    pub fn unit_ball(f: FOperator) -> Result<Self> {
        Self::new(ConvexSet::Ball { center: Point::zeros(2), radius: 1.0 }, f)
    }

    pub fn set(&self) -> &ConvexSet {
        &self.set
    }

    pub fn f(&self) -> &FOperator {
        &self.f
    }

    pub fn dim(&self) -> usize {
        self.f.dim()
    }

    fn theta(&self) -> f64 {
        rotator_angle(&self.f).unwrap_or(0.0)
    }

    /// The normal cone operator `N_C` whose F-resolvent this is.
    pub fn normal_cone(&self) -> Result<MonotoneOperator> {
        Ok(match &self.set {
            ConvexSet::SinglePoint(c) => MonotoneOperator::normal_cone_point(c.clone()),
            ConvexSet::WholeSpace => MonotoneOperator::normal_cone_whole_space(self.dim())?,
            ConvexSet::HorizontalLine => MonotoneOperator::normal_cone_line(),
            ConvexSet::Ball { center, radius } => {
                MonotoneOperator::normal_cone_ball(center.clone(), *radius)?
            }
        })
    }

    /// Membership in `C` to tolerance `tol` (absolute).
    pub fn contains(&self, x: &Point, tol: f64) -> bool {
        match &self.set {
            ConvexSet::SinglePoint(c) => x.distance(c) <= tol,
            ConvexSet::WholeSpace => true,
            ConvexSet::HorizontalLine => x.coords()[1].abs() <= tol,
            ConvexSet::Ball { center, radius } => x.distance(center) <= radius + tol,
        }
    }

    /// Whether `x` is in the interior of `C` with margin `margin`.
    fn interior_margin(&self, x: &Point) -> Option<f64> {
        match &self.set {
            ConvexSet::WholeSpace => Some(f64::INFINITY),
            ConvexSet::Ball { center, radius } => {
                let m = radius - x.distance(center);
                (m > 0.0).then_some(m)
            }
            ConvexSet::SinglePoint(_) | ConvexSet::HorizontalLine => None,
        }
    }

    pub fn project(&self, x: &Point) -> Result<Point> {
        x.ensure_dim(self.dim())?;
        Ok(match &self.set {
            ConvexSet::SinglePoint(c) => c.clone(),
            ConvexSet::WholeSpace => x.clone(),
            ConvexSet::HorizontalLine => {
                let [x1, x2] = [x.coords()[0], x.coords()[1]];
                Point::new(vec![x1 - x2 * self.theta().tan(), 0.0])?
            }
            ConvexSet::Ball { center, radius } => {
                let u = &(x - center) * (1.0 / radius);
                let v = self.project_unit_ball(&u)?.0;
                center + &(&v * *radius)
            }
        })
    }

    /// Unit-ball projection, also returning `α` (0 inside the ball).
    pub fn project_unit_ball(&self, u: &Point) -> Result<(Point, f64)> {
        let n = u.norm();
        if n <= 1.0 + BALL_BOUNDARY_TOL {
            return Ok((u.clone(), 0.0));
        }
        let theta = self.theta();
        let alpha = ball_alpha(theta, n);
        let fu = self.f.apply(u)?;
        let v = &(u + &(&fu * alpha)) * (1.0 / (n * n));
        Ok((v, alpha))
    }

    /// `z + t·Fᵀ z` for `z` on the unit sphere (translated and scaled for
    /// general balls). Every such point projects to `z`.
    pub fn project_inverse_ray(&self, z: &Point, t: f64) -> Result<Point> {
        let ConvexSet::Ball { center, radius } = &self.set else {
            return Err(Error::Unsupported("inverse ray is defined for balls only".into()));
        };
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::InvalidParameter(format!("ray parameter {t} must be >= 0")));
        }
        z.ensure_dim(2)?;
        let u = &(z - center) * (1.0 / radius);
        if (u.norm() - 1.0).abs() > scaled_tol(1.0) {
            return Err(Error::InvalidParameter(format!(
                "{z} is not on the boundary of the ball"
            )));
        }
        let m = self.f.matrix().expect("rotator is linear");
        let ftu = Point::from_vector(m.transpose() * u.as_vector());
        Ok(center + &(&(&u + &(&ftu * t)) * *radius))
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct StructureReport {
    pub checked: usize,
    pub range_failures: usize,
    pub fixed_point_failures: usize,
    pub idempotence_failures: usize,
    pub interior_inverse_failures: usize,
    pub interior_points: usize,
    pub failures: Vec<String>,
    pub passed: bool,
}

/// Checks `ran P_C = C`, `Fix P_C = C`, `P_C² = P_C` and, at interior
/// points `y`, that nearby inputs do not map to `y`.
pub fn projector_structure_check(spec: &ProjectorSpec, sample: &[Point]) -> Result<StructureReport> {
    let mut rep = StructureReport::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0x9_2);
    for x in sample {
        rep.checked += 1;
        let tol = scaled_tol(x.norm());
        let y = spec.project(x)?;
        if !spec.contains(&y, tol) {
            rep.range_failures += 1;
            rep.failures.push(format!("P({x}) = {y} lies outside C"));
        }
        if spec.contains(x, 0.0) && !y.approx_eq(x) {
            rep.fixed_point_failures += 1;
            rep.failures.push(format!("{x} ∈ C but P({x}) = {y}"));
        }
        let yy = spec.project(&y)?;
        if !yy.approx_eq(&y) {
            rep.idempotence_failures += 1;
            rep.failures.push(format!("P(P({x})) = {yy} ≠ {y}"));
        }
        if let Some(margin) = spec.interior_margin(&y) {
            rep.interior_points += 1;
            let scale = (margin.min(1.0) * 1e-3).max(1e-9);
            let h = loop {
                let v: Vec<f64> = (0..y.dim()).map(|_| rng.gen_range(-scale..scale)).collect();
                let h = Point::new(v)?;
                if !h.is_zero() {
                    break h;
                }
            };
            let w = &y + &h;
            if spec.project(&w)?.distance(&y) <= 1e-3 * h.norm() {
                rep.interior_inverse_failures += 1;
                rep.failures.push(format!("P({w}) = {y} for interior y"));
            }
        }
    }
    rep.passed = rep.failures.is_empty();
    Ok(rep)
}
