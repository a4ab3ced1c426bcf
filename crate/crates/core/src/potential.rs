//! Smooth convex potentials with gradient oracles.
//!
//! Potentials serve three roles: as the generator of a base operator
//! `F = ∇f`, as a subdifferential operator `A = ∂f`, and as the kernel of a
//! Bregman distance.

use std::fmt::Debug;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::point::Point;

/// A differentiable convex function on (a subset of) ℝⁿ.
///
/// Implementors used as a base operator must be strictly convex,
/// differentiable on all of ℝⁿ, and cofinite. 3*-monotonicity of the
/// gradient then holds automatically. None of these properties can be
/// verified numerically; [`Potential::admissible_base`] is a declaration.
pub trait Potential: Debug + Send + Sync {
    fn value(&self, x: &Point) -> f64;
    fn gradient(&self, x: &Point) -> Point;

    fn in_domain(&self, _x: &Point) -> bool {
        true
    }

    /// Declares full domain, strict convexity, and cofiniteness.
    fn admissible_base(&self) -> bool {
        false
    }

    fn name(&self) -> String;
}

/// Potentials that can be named in operator JSON.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuiltinPotential {
    /// ½‖x‖²
    HalfSquaredNorm,
    /// ¼‖x‖⁴
    QuarticNorm,
    /// ½‖x‖² + ¼‖x‖⁴
    QuadraticPlusQuartic,
    /// Σ (xᵢ ln xᵢ − xᵢ) on the open positive orthant.
    NegativeEntropy,
    /// Σ exp(xᵢ)
    Exp,
}

impl BuiltinPotential {
    pub fn shared(self) -> Arc<dyn Potential> {
        Arc::new(self)
    }
}

impl Potential for BuiltinPotential {
    fn value(&self, x: &Point) -> f64 {
        let n2 = x.norm_squared();
        match self {
            BuiltinPotential::HalfSquaredNorm => 0.5 * n2,
            BuiltinPotential::QuarticNorm => 0.25 * n2 * n2,
            BuiltinPotential::QuadraticPlusQuartic => 0.5 * n2 + 0.25 * n2 * n2,
            BuiltinPotential::NegativeEntropy => {
                x.coords().iter().map(|&c| c * c.ln() - c).sum()
            }
            BuiltinPotential::Exp => x.coords().iter().map(|c| c.exp()).sum(),
        }
    }

    fn gradient(&self, x: &Point) -> Point {
        let n2 = x.norm_squared();
        match self {
            BuiltinPotential::HalfSquaredNorm => x.clone(),
            BuiltinPotential::QuarticNorm => x * n2,
            BuiltinPotential::QuadraticPlusQuartic => x * (1.0 + n2),
            BuiltinPotential::NegativeEntropy => {
                Point::from_vector(x.as_vector().map(f64::ln))
            }
            BuiltinPotential::Exp => Point::from_vector(x.as_vector().map(f64::exp)),
        }
    }

    fn in_domain(&self, x: &Point) -> bool {
        match self {
            BuiltinPotential::NegativeEntropy => x.coords().iter().all(|&c| c > 0.0),
            _ => true,
        }
    }

    fn admissible_base(&self) -> bool {
        // Negative entropy lacks full domain; exp is not cofinite.
        matches!(
            self,
            BuiltinPotential::HalfSquaredNorm
                | BuiltinPotential::QuarticNorm
                | BuiltinPotential::QuadraticPlusQuartic
        )
    }

    fn name(&self) -> String {
        serde_json::to_value(self)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pt;

    fn fd_gradient(f: &dyn Potential, x: &Point) -> Vec<f64> {
        let h = 1e-6;
        (0..x.dim())
            .map(|i| {
                let e = &Point::basis(x.dim(), i) * h;
                (f.value(&(x + &e)) - f.value(&(x - &e))) / (2.0 * h)
            })
            .collect()
    }

    #[test]
    fn gradients_match_central_differences() {
        let x = pt![0.7, 1.3];
        for f in [
            BuiltinPotential::HalfSquaredNorm,
            BuiltinPotential::QuarticNorm,
            BuiltinPotential::QuadraticPlusQuartic,
            BuiltinPotential::NegativeEntropy,
            BuiltinPotential::Exp,
        ] {
            let g = f.gradient(&x);
            for (a, b) in g.coords().iter().zip(fd_gradient(&f, &x)) {
                assert!((a - b).abs() < 1e-7, "{f:?}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn names_round_trip_through_serde() {
        let p: BuiltinPotential = serde_json::from_str("\"quartic_norm\"").unwrap();
        assert_eq!(p, BuiltinPotential::QuarticNorm);
        assert_eq!(p.name(), "quartic_norm");
    }

    #[test]
    fn entropy_domain() {
        assert!(BuiltinPotential::NegativeEntropy.in_domain(&pt![0.1, 2]));
        assert!(!BuiltinPotential::NegativeEntropy.in_domain(&pt![0, 2]));
        assert!(!BuiltinPotential::NegativeEntropy.admissible_base());
    }
}
