//! Root finding for strongly monotone single-valued equations `G(y) = 0`.
//!
//! Damped Newton with a forward-difference Jacobian is tried first. If it
//! stalls, the explicit iteration `y ← y − τ G(y)` with `τ = λ / L²` takes
//! over; it converges for any `λ`-strongly monotone, `L`-Lipschitz `G`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a resolvent value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Newton,
    StrongMonotoneFixedPoint,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::ClosedForm => "closed_form",
            Method::Newton => "newton",
            Method::StrongMonotoneFixedPoint => "strong_monotone_fixed_point",
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Residual target relative to the problem scale.
    pub tol: f64,
    /// Residual accepted when Newton stalls before reaching `tol`.
    pub accept_tol: f64,
    pub max_newton_iter: usize,
    pub max_fallback_iter: usize,
    /// Relative finite-difference step.
    pub fd_step: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-14,
            accept_tol: 1e-11,
            max_newton_iter: 100,
            max_fallback_iter: 100_000,
            fd_step: 1e-7,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub y: DVector<f64>,
    pub residual: f64,
    pub method: Method,
    pub iterations: usize,
}

fn residual_norm(r: &DVector<f64>) -> f64 {
    if r.iter().all(|c| c.is_finite()) {
        r.norm()
    } else {
        f64::INFINITY
    }
}

fn fd_jacobian<G>(g: &G, y: &DVector<f64>, gy: &DVector<f64>, rel_step: f64) -> DMatrix<f64>
where
    G: Fn(&DVector<f64>) -> DVector<f64>,
{
    let n = y.len();
    let h = rel_step * y.norm().max(1.0);
    let mut jac = DMatrix::zeros(n, n);
    let mut yp = y.clone();
    for j in 0..n {
        yp[j] += h;
        let col = (g(&yp) - gy) / h;
        jac.set_column(j, &col);
        yp[j] = y[j];
    }
    jac
}

/// Solves `g(y) = 0` starting from `y0`.
///
/// `scale` sets the magnitude against which residual tolerances are
/// measured. `fallback_step` is `τ = λ/L²`; pass `None` when no strong
/// monotonicity modulus or Lipschitz bound is known.
pub fn solve<G>(
    g: G,
    y0: DVector<f64>,
    scale: f64,
    fallback_step: Option<f64>,
    opts: &SolverOptions,
) -> Result<Solution>
where
    G: Fn(&DVector<f64>) -> DVector<f64>,
{
    let scale = scale.abs().max(1.0);
    let target = opts.tol * scale;
    let mut y = y0;
    let mut r = g(&y);
    let mut rn = residual_norm(&r);
    let mut iterations = 0;

    while iterations < opts.max_newton_iter && rn > target {
        let jac = fd_jacobian(&g, &y, &r, opts.fd_step);
        let Some(dir) = jac.lu().solve(&(-&r)) else {
            break;
        };
        let mut t = 1.0;
        let mut accepted = false;
        while t > 1e-12 {
            let trial = &y + &dir * t;
            let rt = g(&trial);
            let rtn = residual_norm(&rt);
            if rtn < rn {
                y = trial;
                r = rt;
                rn = rtn;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        iterations += 1;
        if !accepted {
            break;
        }
    }

    if rn <= opts.accept_tol * scale {
        return Ok(Solution {
            y,
            residual: rn,
            method: Method::Newton,
            iterations,
        });
    }

    let Some(tau) = fallback_step.filter(|t| t.is_finite() && *t > 0.0) else {
        return Err(Error::Divergence {
            iterations,
            residual: rn,
        });
    };
    fixed_point(g, y, scale, tau, opts)
}

/// The explicit iteration `y ← y − τ g(y)` alone.
pub fn fixed_point<G>(
    g: G,
    y0: DVector<f64>,
    scale: f64,
    tau: f64,
    opts: &SolverOptions,
) -> Result<Solution>
where
    G: Fn(&DVector<f64>) -> DVector<f64>,
{
    let scale = scale.abs().max(1.0);
    let mut y = y0;
    let mut r = g(&y);
    let mut rn = residual_norm(&r);
    for k in 0..opts.max_fallback_iter {
        if rn <= opts.accept_tol * scale {
            return Ok(Solution {
                y,
                residual: rn,
                method: Method::StrongMonotoneFixedPoint,
                iterations: k,
            });
        }
        y -= &r * tau;
        r = g(&y);
        rn = residual_norm(&r);
        if !rn.is_finite() {
            break;
        }
    }
    if rn <= opts.accept_tol * scale {
        return Ok(Solution {
            y,
            residual: rn,
            method: Method::StrongMonotoneFixedPoint,
            iterations: opts.max_fallback_iter,
        });
    }
    Err(Error::Divergence {
        iterations: opts.max_fallback_iter,
        residual: rn,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn newton_solves_cubic_system() {
        // G(y) = y + y³ − c componentwise
        let c = DVector::from_vec(vec![2.0, -10.0]);
        let sol = solve(
            |y: &DVector<f64>| y + y.map(|v| v * v * v) - &c,
            DVector::zeros(2),
            10.0,
            None,
            &SolverOptions::default(),
        )
        .unwrap();
        assert_eq!(sol.method, Method::Newton);
        assert!((sol.y[0] - 1.0).abs() < 1e-12);
        assert!((sol.y[1] + 2.0).abs() < 1e-12);
    }

    #[test]
    fn fallback_converges_for_strongly_monotone_linear() {
        // G(y) = M y − b with M = [[2, 1], [−1, 2]]: λ = 2, L = √5.
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, -1.0, 2.0]);
        let b = DVector::from_vec(vec![1.0, 3.0]);
        let sol = fixed_point(
            |y: &DVector<f64>| &m * y - &b,
            DVector::zeros(2),
            3.0,
            2.0 / 5.0,
            &SolverOptions::default(),
        )
        .unwrap();
        let exact = m.lu().solve(&b).unwrap();
        assert!((sol.y - exact).norm() < 1e-10);
        assert_eq!(sol.method, Method::StrongMonotoneFixedPoint);
    }

    #[test]
    fn reports_divergence_without_fallback() {
        // |y| + 1 has no root.
        let err = solve(
            |y: &DVector<f64>| y.map(|v| v.abs() + 1.0),
            DVector::zeros(1),
            1.0,
            None,
            &SolverOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Divergence { .. }));
    }
}
