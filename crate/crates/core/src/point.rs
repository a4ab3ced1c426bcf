//! Points of ℝⁿ. The space and its dual are identified through the
//! Euclidean inner product, so one type serves for both `x` and `x*`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DVector;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Absolute tolerance used for every equality test, scaled by
/// `max(1, magnitude)`.
pub const BASE_TOL: f64 = 1e-10;

/// `BASE_TOL * max(1, magnitude)`.
pub fn scaled_tol(magnitude: f64) -> f64 {
    BASE_TOL * magnitude.abs().max(1.0)
}

/// A finite vector in ℝⁿ, n ≥ 1.
#[derive(Clone, PartialEq)]
pub struct Point(DVector<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidParameter("point must have dimension >= 1".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("point coordinates"));
        }
        Ok(Point(DVector::from_vec(coords)))
    }

    /// Builds a point from a vector that is already known to be finite.
    pub(crate) fn from_vector(v: DVector<f64>) -> Self {
        debug_assert!(v.iter().all(|c| c.is_finite()));
        Point(v)
    }

    /// Like [`Point::from_vector`] but checks finiteness.
    pub(crate) fn checked(v: DVector<f64>, what: &'static str) -> Result<Self> {
        if v.iter().all(|c| c.is_finite()) {
            Ok(Point(v))
        } else {
            Err(Error::NonFinite(what))
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Point(DVector::zeros(dim))
    }

    /// Standard basis vector `e_i` in ℝⁿ.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[i] = 1.0;
        Point(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn into_vector(self) -> DVector<f64> {
        self.0
    }

    pub fn dot(&self, other: &Point) -> f64 {
        self.0.dot(&other.0)
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn norm_squared(&self) -> f64 {
        self.0.norm_squared()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.amax()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0.0)
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (&self.0 - &other.0).norm()
    }

    /// Equality to the crate tolerance, scaled by the larger norm.
    pub fn approx_eq(&self, other: &Point) -> bool {
        self.approx_eq_tol(other, BASE_TOL)
    }

    pub fn approx_eq_tol(&self, other: &Point, tol: f64) -> bool {
        let scale = self.norm().max(other.norm()).max(1.0);
        self.dim() == other.dim() && self.distance(other) <= tol * scale
    }

    pub(crate) fn ensure_dim(&self, dim: usize) -> Result<()> {
        if self.dim() == dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: dim,
                got: self.dim(),
            })
        }
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Point").field(&self.coords()).finish()
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let coords = Vec::<f64>::deserialize(d)?;
        Point::new(coords).map_err(serde::de::Error::custom)
    }
}

impl Add for &Point {
    type Output = Point;
    fn add(self, rhs: &Point) -> Point {
        Point(&self.0 + &rhs.0)
    }
}

impl Sub for &Point {
    type Output = Point;
    fn sub(self, rhs: &Point) -> Point {
        Point(&self.0 - &rhs.0)
    }
}

impl Mul<f64> for &Point {
    type Output = Point;
    fn mul(self, rhs: f64) -> Point {
        Point(&self.0 * rhs)
    }
}

impl Neg for &Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point(-&self.0)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Vec<f64> {
        p.0.as_slice().to_vec()
    }
}

/// Shorthand used heavily in tests and examples.
#[macro_export]
macro_rules! pt {
    ($($c:expr),+ $(,)?) => {
        $crate::Point::new(vec![$($c as f64),+]).expect("finite literal point")
    };
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_and_empty() {
        assert!(matches!(Point::new(vec![1.0, f64::NAN]), Err(Error::NonFinite(_))));
        assert!(matches!(Point::new(vec![f64::INFINITY]), Err(Error::NonFinite(_))));
        assert!(Point::new(vec![]).is_err());
    }

    #[test]
    fn arithmetic() {
        let a = pt![1, 2];
        let b = pt![3, -1];
        assert_eq!(&a + &b, pt![4, 1]);
        assert_eq!(&a - &b, pt![-2, 3]);
        assert_eq!(&a * 2.0, pt![2, 4]);
        assert_eq!(a.dot(&b), 1.0);
        assert_eq!(pt![3, -4].norm(), 5.0);
    }

    #[test]
    fn serde_as_array() {
        let p: Point = serde_json::from_str("[0.5, -1]").unwrap();
        assert_eq!(p, pt![0.5, -1]);
        assert_eq!(serde_json::to_string(&p).unwrap(), "[0.5,-1.0]");
        assert!(serde_json::from_str::<Point>("[]").is_err());
    }
}
