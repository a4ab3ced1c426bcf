//! Admissible base operators `F`: single-valued, strictly monotone,
//! 3*-monotone and surjective maps ℝⁿ → ℝⁿ.

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::point::{scaled_tol, Point};
use crate::potential::Potential;
use crate::solver::{self, SolverOptions};

#[derive(Debug, Clone)]
pub enum FKind {
    Identity,
    /// Counter-clockwise rotation of ℝ² by `theta ∈ [0, π/2)`.
    Rotator { theta: f64 },
    /// `x ↦ ‖x‖^(p−2) x`, the gradient of `‖x‖^p / p`.
    PNormGradient { p: f64 },
    SmoothConvexGradient(Arc<dyn Potential>),
    /// A linear map whose symmetric part is positive definite.
    LinearSpd(DMatrix<f64>),
}

#[derive(Debug, Clone)]
pub struct FOperator {
    kind: FKind,
    dim: usize,
    operator_norm: Option<f64>,
    strong_monotonicity_modulus: f64,
}

const SPOT_CHECK_SEED: u64 = 0x0f0f_2009;
const SPOT_CHECK_SAMPLES: usize = 16;

impl FOperator {
    pub fn identity(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        Ok(FOperator {
            kind: FKind::Identity,
            dim,
            operator_norm: Some(1.0),
            strong_monotonicity_modulus: 1.0,
        })
    }

    pub fn rotator(theta: f64) -> Result<Self> {
        if !(theta.is_finite() && (0.0..FRAC_PI_2).contains(&theta)) {
            return Err(Error::NotAdmissible(format!(
                "rotator angle {theta} must lie in [0, π/2)"
            )));
        }
        let op = FOperator {
            kind: FKind::Rotator { theta },
            dim: 2,
            operator_norm: Some(1.0),
            strong_monotonicity_modulus: theta.cos(),
        };
        op.spot_check()?;
        Ok(op)
    }

    pub fn p_norm_gradient(p: f64, dim: usize) -> Result<Self> {
        if !(p.is_finite() && p > 1.0) {
            return Err(Error::NotAdmissible(format!("p = {p} must lie in (1, ∞)")));
        }
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        let linear = p == 2.0;
        let op = FOperator {
            kind: FKind::PNormGradient { p },
            dim,
            operator_norm: linear.then_some(1.0),
            strong_monotonicity_modulus: if linear { 1.0 } else { 0.0 },
        };
        op.spot_check()?;
        Ok(op)
    }

    /// `F = M` for a square matrix with positive definite symmetric part.
    pub fn linear(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::InvalidParameter("matrix must be square and nonempty".into()));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("matrix entries"));
        }
        let lambda = sym_min_eigenvalue(&m);
        if lambda <= 0.0 {
            return Err(Error::NotAdmissible(format!(
                "symmetric part has smallest eigenvalue {lambda} <= 0"
            )));
        }
        let norm = spectral_norm(&m);
        let op = FOperator {
            dim: m.nrows(),
            kind: FKind::LinearSpd(m),
            operator_norm: Some(norm),
            strong_monotonicity_modulus: lambda,
        };
        op.spot_check()?;
        Ok(op)
    }

    /// `F = ∇f`. The modulus and Lipschitz bound are declarations; they
    /// enable the fallback iteration when inverting `F` numerically.
    pub fn smooth_convex_gradient(
        potential: Arc<dyn Potential>,
        dim: usize,
        strong_modulus: f64,
        lipschitz_bound: Option<f64>,
    ) -> Result<Self> {
        if !potential.admissible_base() {
            return Err(Error::NotAdmissible(format!(
                "potential `{}` is not declared strictly convex, full-domain and cofinite",
                potential.name()
            )));
        }
        if dim == 0 || !(strong_modulus >= 0.0) {
            return Err(Error::InvalidParameter("bad dimension or modulus".into()));
        }
        let op = FOperator {
            kind: FKind::SmoothConvexGradient(potential),
            dim,
            operator_norm: lipschitz_bound,
            strong_monotonicity_modulus: strong_modulus,
        };
        op.spot_check()?;
        Ok(op)
    }

    pub fn kind(&self) -> &FKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `‖F‖` for linear kinds, a declared Lipschitz bound otherwise.
    pub fn operator_norm(&self) -> Option<f64> {
        self.operator_norm
    }

    pub fn strong_monotonicity_modulus(&self) -> f64 {
        self.strong_monotonicity_modulus
    }

    pub fn is_linear(&self) -> bool {
        self.matrix().is_some()
    }

    /// The matrix of `F` when `F` is linear.
    pub fn matrix(&self) -> Option<DMatrix<f64>> {
        match &self.kind {
            FKind::Identity => Some(DMatrix::identity(self.dim, self.dim)),
            FKind::Rotator { theta } => Some(rotation_matrix(*theta)),
            FKind::LinearSpd(m) => Some(m.clone()),
            FKind::PNormGradient { p } if *p == 2.0 => {
                Some(DMatrix::identity(self.dim, self.dim))
            }
            _ => None,
        }
    }

    pub fn apply(&self, x: &Point) -> Result<Point> {
        x.ensure_dim(self.dim)?;
        let v = self.apply_vec(x.as_vector());
        Point::checked(v, "F(x)")
    }

    pub(crate) fn apply_vec(&self, x: &DVector<f64>) -> DVector<f64> {
        match &self.kind {
            FKind::Identity => x.clone(),
            FKind::Rotator { theta } => rotation_matrix(*theta) * x,
            FKind::PNormGradient { p } => {
                let n = x.norm();
                if n == 0.0 {
                    DVector::zeros(x.len())
                } else {
                    x * n.powf(p - 2.0)
                }
            }
            FKind::SmoothConvexGradient(f) => match Point::checked(x.clone(), "x") {
                Ok(px) => f.gradient(&px).into_vector(),
                Err(_) => DVector::from_element(x.len(), f64::NAN),
            },
            FKind::LinearSpd(m) => m * x,
        }
    }

    /// The unique `x` with `F x = w`.
    pub fn inverse(&self, w: &Point) -> Result<Point> {
        w.ensure_dim(self.dim)?;
        let v = match &self.kind {
            FKind::Identity => w.as_vector().clone(),
            FKind::Rotator { theta } => rotation_matrix(*theta).transpose() * w.as_vector(),
            FKind::PNormGradient { p } => {
                let n = w.norm();
                if n == 0.0 {
                    DVector::zeros(self.dim)
                } else {
                    w.as_vector() * n.powf((2.0 - p) / (p - 1.0))
                }
            }
            FKind::LinearSpd(m) => m
                .clone()
                .lu()
                .solve(w.as_vector())
                .ok_or_else(|| Error::InternalConsistency("singular linear F".into()))?,
            FKind::SmoothConvexGradient(_) => {
                let target = w.as_vector().clone();
                let tau = self.fallback_step();
                let sol = solver::solve(
                    |y| self.apply_vec(y) - &target,
                    target.clone(),
                    w.norm(),
                    tau,
                    &SolverOptions::default(),
                )?;
                sol.y
            }
        };
        Point::checked(v, "F⁻¹(w)")
    }

    /// `τ = λ/L²` for the explicit fallback iteration, when defined.
    pub(crate) fn fallback_step(&self) -> Option<f64> {
        let lambda = self.strong_monotonicity_modulus;
        match self.operator_norm {
            Some(l) if lambda > 0.0 && l > 0.0 => Some(lambda / (l * l)),
            _ => None,
        }
    }

    fn spot_check(&self) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(SPOT_CHECK_SEED);
        let draw = |rng: &mut ChaCha8Rng| {
            Point::from_vector(DVector::from_fn(self.dim, |_, _| rng.gen_range(-2.0..2.0)))
        };
        for _ in 0..SPOT_CHECK_SAMPLES {
            let x = draw(&mut rng);
            let y = draw(&mut rng);
            if x == y {
                continue;
            }
            let d = &x - &y;
            let df = &self.apply(&x)? - &self.apply(&y)?;
            if d.dot(&df) <= 0.0 {
                return Err(Error::NotAdmissible(format!(
                    "strict monotonicity fails at {x} and {y}"
                )));
            }
            let w = draw(&mut rng);
            let back = self.apply(&self.inverse(&w)?)?;
            if back.distance(&w) > 1e3 * scaled_tol(w.norm()) {
                return Err(Error::NotAdmissible(format!("F(F⁻¹ w) ≠ w at {w}")));
            }
        }
        Ok(())
    }
}

pub fn rotation_matrix(theta: f64) -> DMatrix<f64> {
    let (s, c) = theta.sin_cos();
    DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
}

/// Smallest eigenvalue of `(M + Mᵀ)/2`.
pub fn sym_min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    let sym = (m + m.transpose()) * 0.5;
    sym.symmetric_eigen().eigenvalues.min()
}

/// Largest singular value.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    m.clone().singular_values().max()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::BuiltinPotential;
    use crate::pt;
    use std::f64::consts::PI;

    #[test]
    fn identity_apply() {
        let f = FOperator::identity(2).unwrap();
        assert_eq!(f.apply(&pt![3, -4]).unwrap(), pt![3, -4]);
        assert_eq!(f.inverse(&pt![3, -4]).unwrap(), pt![3, -4]);
    }

    #[test]
    fn rotator_apply_unit_vector() {
        let f = FOperator::rotator(PI / 3.0).unwrap();
        let y = f.apply(&pt![1, 0]).unwrap();
        assert!(y.approx_eq(&pt![0.5, 3f64.sqrt() / 2.0]));
        let x = pt![0.3, -1.7];
        assert!(f.inverse(&f.apply(&x).unwrap()).unwrap().approx_eq(&x));
    }

    #[test]
    fn rotator_angle_range() {
        assert!(FOperator::rotator(0.0).is_ok());
        assert!(FOperator::rotator(1.5).is_ok());
        assert!(matches!(FOperator::rotator(FRAC_PI_2), Err(Error::NotAdmissible(_))));
        assert!(FOperator::rotator(-0.1).is_err());
    }

    #[test]
    fn p_norm_gradient_values() {
        let f = FOperator::p_norm_gradient(3.0, 2).unwrap();
        assert_eq!(f.apply(&pt![0, 2]).unwrap(), pt![0, 4]);
        assert!(f.inverse(&pt![0, 4]).unwrap().approx_eq(&pt![0, 2]));
        assert_eq!(f.apply(&Point::zeros(2)).unwrap(), Point::zeros(2));
        // p < 2 is singular at the origin; the value there is forced to 0.
        let g = FOperator::p_norm_gradient(1.5, 2).unwrap();
        assert_eq!(g.apply(&Point::zeros(2)).unwrap(), Point::zeros(2));
        assert_eq!(g.inverse(&Point::zeros(2)).unwrap(), Point::zeros(2));
        assert!(FOperator::p_norm_gradient(1.0, 2).is_err());
    }

    #[test]
    fn linear_requires_positive_definite_symmetric_part() {
        let skew = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        assert!(FOperator::linear(skew).is_err());
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, -1.0, 1.0]);
        let f = FOperator::linear(m).unwrap();
        assert!((f.strong_monotonicity_modulus() - 1.0).abs() < 1e-12);
        let x = pt![0.4, -2.0];
        assert!(f.inverse(&f.apply(&x).unwrap()).unwrap().approx_eq(&x));
    }

    #[test]
    fn smooth_gradient_inverse_by_solver() {
        let f = FOperator::smooth_convex_gradient(
            BuiltinPotential::QuadraticPlusQuartic.shared(),
            2,
            1.0,
            None,
        )
        .unwrap();
        let x = pt![1.5, -0.5];
        let w = f.apply(&x).unwrap();
        assert!(f.inverse(&w).unwrap().approx_eq(&x));
        assert!(FOperator::smooth_convex_gradient(
            BuiltinPotential::Exp.shared(),
            1,
            0.0,
            None
        )
        .is_err());
    }

    #[test]
    fn dimension_mismatch() {
        let f = FOperator::identity(3).unwrap();
        assert!(matches!(
            f.apply(&pt![1, 2]),
            Err(Error::DimensionMismatch { expected: 3, got: 2 })
        ));
    }
}
