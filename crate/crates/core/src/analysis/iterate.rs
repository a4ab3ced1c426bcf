use serde::Serialize;

use crate::base::FOperator;
use crate::error::{Error, Result};
use crate::monotone::MonotoneOperator;
use crate::point::Point;
use crate::resolvent::resolvent_apply;

/// Slack allowed on the contraction bound.
pub const BOUND_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct IterationTrace {
    pub iterates: Vec<Point>,
    /// `rates[k] = ‖x_{k+1}‖ / ‖x_k‖`, `None` where `x_k = 0`.
    pub rates: Vec<Option<f64>>,
    /// `1/√(1 + α²)` with `α = 1/‖F‖`, when the theory provides one.
    pub bound: Option<f64>,
    pub converged: bool,
}

impl IterationTrace {
    pub fn len(&self) -> usize {
        self.iterates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.iterates.is_empty()
    }

    pub fn last(&self) -> &Point {
        self.iterates.last().expect("trace holds x0")
    }
}

/// `1/√(1 + 1/‖F‖²)` for linear `F`.
pub fn contraction_bound(f: &FOperator) -> Result<f64> {
    let norm = match (f.is_linear(), f.operator_norm()) {
        (true, Some(n)) => n,
        _ => {
            return Err(Error::Unsupported(
                "contraction bound needs a linear F with known norm".into(),
            ))
        }
    };
    let alpha = 1.0 / norm;
    Ok(1.0 / (1.0 + alpha * alpha).sqrt())
}

/// Iterates `x_{n+1} = (Id + F)⁻¹ F x_n` for linear `F` until
/// `‖x_n‖ ≤ tol` or `max_iter` steps. Every step ratio must respect the
/// contraction bound; a violation is an error.
pub fn contraction_iterate(f: &FOperator, x0: &Point, max_iter: usize, tol: f64) -> Result<IterationTrace> {
    let bound = contraction_bound(f)?;
    let id = MonotoneOperator::identity(f.dim())?;
    let mut iterates = vec![x0.clone()];
    let mut rates = Vec::new();
    let mut x = x0.clone();
    while x.norm() > tol && rates.len() < max_iter {
        let next = resolvent_apply(&id, f, &x)?.output;
        let ratio = next.norm() / x.norm();
        if ratio > bound + BOUND_SLACK {
            return Err(Error::BoundViolated { step: rates.len(), ratio, bound });
        }
        rates.push(Some(ratio));
        iterates.push(next.clone());
        x = next;
    }
    Ok(IterationTrace { converged: x.norm() <= tol, iterates, rates, bound: Some(bound) })
}

/// Plain iteration of a general F-resolvent, stopping when successive
/// iterates are within `tol`. No convergence is asserted: outside the
/// linear-F, `A = Id` case there is no general theory.
pub fn resolvent_iterate(
    a: &MonotoneOperator,
    f: &FOperator,
    x0: &Point,
    max_iter: usize,
    tol: f64,
) -> Result<IterationTrace> {
    let mut iterates = vec![x0.clone()];
    let mut rates = Vec::new();
    let mut x = x0.clone();
    let mut converged = false;
    for _ in 0..max_iter {
        let next = resolvent_apply(a, f, &x)?.output;
        rates.push((x.norm() > 0.0).then(|| next.norm() / x.norm()));
        let step = next.distance(&x);
        iterates.push(next.clone());
        x = next;
        if step <= tol {
            converged = true;
            break;
        }
    }
    Ok(IterationTrace { iterates, rates, bound: None, converged })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pt;

    #[test]
    fn identity_halves_each_step() {
        let f = FOperator::identity(2).unwrap();
        let tr = contraction_iterate(&f, &pt![1, 0], 100, 1e-12).unwrap();
        assert_eq!(tr.len(), 41);
        assert!(tr.rates.iter().all(|r| *r == Some(0.5)));
        assert!((tr.bound.unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(tr.converged);
    }

    #[test]
    fn rotator_ratio_is_resolvent_norm() {
        // ‖M‖ = ½√(1 + tan²(θ/2)) from the 2×2 singular values of M.
        let theta = 1.0_f64;
        let f = FOperator::rotator(theta).unwrap();
        let tr = contraction_iterate(&f, &pt![1, 2], 50, 0.0).unwrap();
        let expected = 0.5 * (1.0 + (theta / 2.0).tan().powi(2)).sqrt();
        for r in &tr.rates {
            assert!((r.unwrap() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_start_is_converged() {
        let f = FOperator::identity(3).unwrap();
        let tr = contraction_iterate(&f, &Point::zeros(3), 10, 1e-12).unwrap();
        assert_eq!(tr.len(), 1);
        assert!(tr.converged);
        assert!(tr.rates.is_empty());
    }

    #[test]
    fn nonlinear_f_rejected() {
        let f = FOperator::p_norm_gradient(3.0, 2).unwrap();
        assert!(contraction_iterate(&f, &pt![1, 0], 10, 1e-9).is_err());
    }

    #[test]
    fn general_driver_logs_p_norm_iteration() {
        let a = MonotoneOperator::identity(2).unwrap();
        let f = FOperator::p_norm_gradient(3.0, 2).unwrap();
        let tr = resolvent_iterate(&a, &f, &pt![2, 1], 200, 1e-12).unwrap();
        assert!(tr.bound.is_none());
        assert_eq!(tr.rates.len(), tr.len() - 1);
    }
}
