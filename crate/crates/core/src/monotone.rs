//! Set-valued monotone operators `A: ℝⁿ ⇉ ℝⁿ` with exact evaluation
//! oracles, and finite graph samples.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::base::{spectral_norm, sym_min_eigenvalue};
use crate::error::{Error, Result};
use crate::point::{scaled_tol, Point};
use crate::potential::Potential;

/// Relative tolerance for set membership tests.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Finite description of a value `Ax`.
#[derive(Debug, Clone, PartialEq)]
pub enum SetValue {
    Empty,
    Singleton(Point),
    /// Several sampled values at the same base point.
    Finite(Vec<Point>),
    /// `{t·d : t ≥ 0}`.
    Ray(Point),
    /// The linear span of an orthonormal family.
    Subspace(Vec<Point>),
}

impl SetValue {
    pub fn is_empty(&self) -> bool {
        matches!(self, SetValue::Empty)
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.contains_tol(p, MEMBERSHIP_TOL * p.norm().max(1.0))
    }

    pub fn contains_tol(&self, p: &Point, tol: f64) -> bool {
        match self {
            SetValue::Empty => false,
            SetValue::Singleton(v) => v.distance(p) <= tol,
            SetValue::Finite(vs) => vs.iter().any(|v| v.distance(p) <= tol),
            SetValue::Ray(d) => {
                let t = (p.dot(d) / d.norm_squared()).max(0.0);
                (p - &(d * t)).norm() <= tol
            }
            SetValue::Subspace(basis) => {
                let mut r = p.clone();
                for b in basis {
                    r = &r - &(b * r.dot(b));
                }
                r.norm() <= tol
            }
        }
    }
}

/// A finite list of pairs `(x, x*)`, a sample of `gra A`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphSample {
    pairs: Vec<(Point, Point)>,
}

impl GraphSample {
    pub fn new(pairs: Vec<(Point, Point)>) -> Result<Self> {
        let Some((first, _)) = pairs.first() else {
            return Err(Error::InvalidParameter("graph sample must be nonempty".into()));
        };
        let dim = first.dim();
        for (x, xs) in &pairs {
            x.ensure_dim(dim)?;
            xs.ensure_dim(dim)?;
        }
        Ok(GraphSample { pairs })
    }

    /// Builds a one-dimensional sample from scalar pairs.
    pub fn from_scalars(pairs: &[(f64, f64)]) -> Result<Self> {
        let pts = pairs
            .iter()
            .map(|&(a, b)| Ok((Point::new(vec![a])?, Point::new(vec![b])?)))
            .collect::<Result<Vec<_>>>()?;
        GraphSample::new(pts)
    }

    pub fn pairs(&self) -> &[(Point, Point)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.pairs[0].0.dim()
    }

    /// Swaps the roles of `x` and `x*`: a sample of `gra A⁻¹`.
    pub fn inverse(&self) -> GraphSample {
        GraphSample {
            pairs: self.pairs.iter().map(|(a, b)| (b.clone(), a.clone())).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityReport {
    pub is_monotone: bool,
    pub worst_pair: Option<(usize, usize)>,
    pub worst_value: f64,
    pub tolerance: f64,
}

/// Checks `⟨xᵢ − xⱼ, xᵢ* − xⱼ*⟩ ≥ −tol` over all pairs.
pub fn graph_monotonicity_check(g: &GraphSample) -> MonotonicityReport {
    let pairs = g.pairs();
    let max_x = pairs.iter().map(|(x, _)| x.norm()).fold(0.0, f64::max);
    let max_xs = pairs.iter().map(|(_, s)| s.norm()).fold(0.0, f64::max);
    let tolerance = 1e-12 * (4.0 * max_x * max_xs).max(1.0);
    let mut worst_pair = None;
    let mut worst_value = f64::INFINITY;
    for i in 0..pairs.len() {
        for j in (i + 1)..pairs.len() {
            let v = (&pairs[i].0 - &pairs[j].0).dot(&(&pairs[i].1 - &pairs[j].1));
            if v < worst_value {
                worst_value = v;
                worst_pair = Some((i, j));
            }
        }
    }
    if worst_pair.is_none() {
        worst_value = 0.0;
    }
    MonotonicityReport {
        is_monotone: worst_value >= -tolerance,
        worst_pair,
        worst_value,
        tolerance,
    }
}

/// `A = ∂f` for a smooth convex `f`, with declared constants used by the
/// numeric resolvent's fallback.
#[derive(Debug, Clone)]
pub struct Subdifferential {
    pub potential: Arc<dyn Potential>,
    pub strong_modulus: f64,
    pub lipschitz: Option<f64>,
}

#[derive(Debug, Clone)]
pub enum MonotoneForm {
    Identity,
    Zero,
    Linear(DMatrix<f64>),
    NormalConePoint(Point),
    /// Normal cone of ℝ × {0} ⊂ ℝ².
    NormalConeLine,
    NormalConeBall { center: Point, radius: f64 },
    NormalConeWholeSpace,
    Subdifferential(Subdifferential),
    FromGraph(GraphSample),
}

#[derive(Debug, Clone)]
pub struct MonotoneOperator {
    form: MonotoneForm,
    dim: usize,
}

impl MonotoneOperator {
    fn checked_dim(dim: usize) -> Result<usize> {
        if dim == 0 {
            Err(Error::InvalidParameter("dimension must be >= 1".into()))
        } else {
            Ok(dim)
        }
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Ok(Self { form: MonotoneForm::Identity, dim: Self::checked_dim(dim)? })
    }

    pub fn zero(dim: usize) -> Result<Self> {
        Ok(Self { form: MonotoneForm::Zero, dim: Self::checked_dim(dim)? })
    }

    /// A linear map with positive semidefinite symmetric part.
    pub fn linear(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::InvalidParameter("matrix must be square and nonempty".into()));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("matrix entries"));
        }
        let lambda = sym_min_eigenvalue(&m);
        if lambda < -1e-12 * spectral_norm(&m).max(1.0) {
            return Err(Error::NotAdmissible(format!(
                "linear operator is not monotone: symmetric part has eigenvalue {lambda}"
            )));
        }
        Ok(Self { dim: m.nrows(), form: MonotoneForm::Linear(m) })
    }

    pub fn normal_cone_point(c: Point) -> Self {
        Self { dim: c.dim(), form: MonotoneForm::NormalConePoint(c) }
    }

    pub fn normal_cone_line() -> Self {
        Self { dim: 2, form: MonotoneForm::NormalConeLine }
    }

    pub fn normal_cone_ball(center: Point, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidParameter(format!("ball radius {radius} must be positive")));
        }
        Ok(Self { dim: center.dim(), form: MonotoneForm::NormalConeBall { center, radius } })
    }

    pub fn normal_cone_whole_space(dim: usize) -> Result<Self> {
        Ok(Self { form: MonotoneForm::NormalConeWholeSpace, dim: Self::checked_dim(dim)? })
    }

    pub fn subdifferential(sub: Subdifferential, dim: usize) -> Result<Self> {
        if !(sub.strong_modulus >= 0.0) {
            return Err(Error::InvalidParameter("strong modulus must be >= 0".into()));
        }
        Ok(Self { form: MonotoneForm::Subdifferential(sub), dim: Self::checked_dim(dim)? })
    }

    /// Fails unless the sample is monotone.
    pub fn from_graph(g: GraphSample) -> Result<Self> {
        let report = graph_monotonicity_check(&g);
        if !report.is_monotone {
            let (i, j) = report.worst_pair.unwrap_or((0, 0));
            return Err(Error::NotMonotone { i, j, value: report.worst_value });
        }
        Ok(Self { dim: g.dim(), form: MonotoneForm::FromGraph(g) })
    }

    pub fn form(&self) -> &MonotoneForm {
        &self.form
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Matrix for the linear forms (identity, zero, linear).
    pub fn matrix(&self) -> Option<DMatrix<f64>> {
        match &self.form {
            MonotoneForm::Identity => Some(DMatrix::identity(self.dim, self.dim)),
            MonotoneForm::Zero | MonotoneForm::NormalConeWholeSpace => {
                Some(DMatrix::zeros(self.dim, self.dim))
            }
            MonotoneForm::Linear(m) => Some(m.clone()),
            _ => None,
        }
    }

    /// Evaluation for single-valued, full-domain forms.
    pub(crate) fn single_valued(&self, y: &DVector<f64>) -> Option<DVector<f64>> {
        match &self.form {
            MonotoneForm::Identity => Some(y.clone()),
            MonotoneForm::Zero | MonotoneForm::NormalConeWholeSpace => {
                Some(DVector::zeros(y.len()))
            }
            MonotoneForm::Linear(m) => Some(m * y),
            MonotoneForm::Subdifferential(s) => {
                let p = Point::checked(y.clone(), "y").ok()?;
                Some(s.potential.gradient(&p).into_vector())
            }
            _ => None,
        }
    }

    pub fn is_single_valued(&self) -> bool {
        matches!(
            self.form,
            MonotoneForm::Identity
                | MonotoneForm::Zero
                | MonotoneForm::NormalConeWholeSpace
                | MonotoneForm::Linear(_)
                | MonotoneForm::Subdifferential(_)
        )
    }

    /// `(strong monotonicity modulus, Lipschitz bound)` when known.
    pub(crate) fn constants(&self) -> (f64, Option<f64>) {
        match &self.form {
            MonotoneForm::Identity => (1.0, Some(1.0)),
            MonotoneForm::Zero | MonotoneForm::NormalConeWholeSpace => (0.0, Some(0.0)),
            MonotoneForm::Linear(m) => (sym_min_eigenvalue(m).max(0.0), Some(spectral_norm(m))),
            MonotoneForm::Subdifferential(s) => (s.strong_modulus, s.lipschitz),
            _ => (0.0, None),
        }
    }

    /// A finite description of `Ax`.
    pub fn eval(&self, x: &Point) -> Result<SetValue> {
        x.ensure_dim(self.dim)?;
        let n = self.dim;
        Ok(match &self.form {
            MonotoneForm::Identity => SetValue::Singleton(x.clone()),
            MonotoneForm::Zero | MonotoneForm::NormalConeWholeSpace => {
                SetValue::Singleton(Point::zeros(n))
            }
            MonotoneForm::Linear(m) => {
                SetValue::Singleton(Point::checked(m * x.as_vector(), "Ax")?)
            }
            MonotoneForm::Subdifferential(s) => {
                if !s.potential.in_domain(x) {
                    SetValue::Empty
                } else {
                    SetValue::Singleton(s.potential.gradient(x))
                }
            }
            MonotoneForm::NormalConePoint(c) => {
                if x.distance(c) <= scaled_tol(c.norm()) {
                    SetValue::Subspace((0..n).map(|i| Point::basis(n, i)).collect())
                } else {
                    SetValue::Empty
                }
            }
            MonotoneForm::NormalConeLine => {
                if x.coords()[1].abs() <= scaled_tol(x.coords()[0]) {
                    SetValue::Subspace(vec![Point::basis(2, 1)])
                } else {
                    SetValue::Empty
                }
            }
            MonotoneForm::NormalConeBall { center, radius } => {
                let d = x - center;
                let r = d.norm();
                let tol = scaled_tol(*radius);
                if r < radius - tol {
                    SetValue::Singleton(Point::zeros(n))
                } else if r <= radius + tol {
                    SetValue::Ray(d)
                } else {
                    SetValue::Empty
                }
            }
            MonotoneForm::FromGraph(g) => {
                let hits: Vec<Point> = g
                    .pairs()
                    .iter()
                    .filter(|(u, _)| u.distance(x) <= 1e-12 * u.norm().max(1.0))
                    .map(|(_, us)| us.clone())
                    .collect();
                match hits.len() {
                    0 => return Err(Error::NotInSample),
                    1 => SetValue::Singleton(hits.into_iter().next().expect("one hit")),
                    _ => SetValue::Finite(hits),
                }
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pt;

    #[test]
    fn ball_normal_cone_regions() {
        let a = MonotoneOperator::normal_cone_ball(Point::zeros(2), 1.0).unwrap();
        assert_eq!(a.eval(&pt![0.5, 0]).unwrap(), SetValue::Singleton(pt![0, 0]));
        assert_eq!(a.eval(&pt![1, 0]).unwrap(), SetValue::Ray(pt![1, 0]));
        assert_eq!(a.eval(&pt![1.5, 0]).unwrap(), SetValue::Empty);
    }

    #[test]
    fn zero_and_line_and_point() {
        let z = MonotoneOperator::zero(3).unwrap();
        assert_eq!(z.eval(&pt![1, 2, 3]).unwrap(), SetValue::Singleton(Point::zeros(3)));
        let line = MonotoneOperator::normal_cone_line();
        assert!(line.eval(&pt![4, 0]).unwrap().contains(&pt![0, -7]));
        assert!(!line.eval(&pt![4, 0]).unwrap().contains(&pt![1, 0]));
        assert!(line.eval(&pt![4, 1]).unwrap().is_empty());
        let p = MonotoneOperator::normal_cone_point(pt![1, 1]);
        assert!(p.eval(&pt![1, 1]).unwrap().contains(&pt![-3, 8]));
        assert!(p.eval(&pt![1, 0]).unwrap().is_empty());
    }

    #[test]
    fn ray_membership() {
        let ray = SetValue::Ray(pt![1, 1]);
        assert!(ray.contains(&pt![2, 2]));
        assert!(ray.contains(&pt![0, 0]));
        assert!(!ray.contains(&pt![-1, -1]));
        assert!(!ray.contains(&pt![1, 0]));
    }

    #[test]
    fn monotonicity_of_small_graphs() {
        let id = GraphSample::from_scalars(&[(0.0, 0.0), (1.0, 1.0)]).unwrap();
        assert!(graph_monotonicity_check(&id).is_monotone);

        let dec = GraphSample::from_scalars(&[(0.0, 1.0), (1.0, 0.0)]).unwrap();
        let r = graph_monotonicity_check(&dec);
        assert!(!r.is_monotone);
        assert_eq!(r.worst_value, -1.0);
        assert_eq!(r.worst_pair, Some((0, 1)));

        // x ↦ x³ at {−1, 0, 1}: products 1, 2, 1.
        let cube = GraphSample::from_scalars(&[(-1.0, -1.0), (0.0, 0.0), (1.0, 1.0)]).unwrap();
        let r = graph_monotonicity_check(&cube);
        assert!(r.is_monotone);
        assert_eq!(r.worst_value, 1.0);
    }

    #[test]
    fn from_graph_rejects_non_monotone_and_unknown_points() {
        let dec = GraphSample::from_scalars(&[(0.0, 1.0), (1.0, 0.0)]).unwrap();
        assert!(matches!(MonotoneOperator::from_graph(dec), Err(Error::NotMonotone { .. })));
        let id = GraphSample::from_scalars(&[(0.0, 0.0), (1.0, 1.0)]).unwrap();
        let a = MonotoneOperator::from_graph(id).unwrap();
        assert_eq!(a.eval(&pt![1]).unwrap(), SetValue::Singleton(pt![1]));
        assert!(matches!(a.eval(&pt![0.5]), Err(Error::NotInSample)));
    }

    #[test]
    fn sample_validation() {
        assert!(GraphSample::new(vec![]).is_err());
        assert!(GraphSample::new(vec![(pt![1], pt![1, 2])]).is_err());
    }

    #[test]
    fn linear_must_be_monotone() {
        let neg = DMatrix::from_row_slice(1, 1, &[-1.0]);
        assert!(MonotoneOperator::linear(neg).is_err());
        let skew = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        assert!(MonotoneOperator::linear(skew).is_ok());
    }
}
