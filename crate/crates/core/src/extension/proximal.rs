use crate::error::{Error, Result};
use crate::extension::grid::{Grid, GridFunction};
use crate::extension::legendre::{conjugate_onto, MIN_RESOLUTION};

fn half_sq(x: f64, y: f64) -> f64 {
    0.5 * (x * x + y * y)
}

/// Largest forward-difference slope along either axis.
fn max_slope(f: &GridFunction) -> f64 {
    let n = f.resolution();
    let h = f.spacing();
    let mut m: f64 = 0.0;
    for i in 0..n {
        for j in 0..n - 1 {
            m = m.max((f.at(i, j + 1) - f.at(i, j)).abs());
            m = m.max((f.at(j + 1, i) - f.at(j, i)).abs());
        }
    }
    m / h
}

/// Proximal average `Ψ` of `φ` and `φ*ᵀ` with equal weights and unit
/// parameter, evaluated at the grid nodes.
///
/// Uses `Ψ = (½(φ + q)* + ½(φ*ᵀ + q)*)* − q` with `q = ½‖·‖²`, each
/// conjugate done by the exact separable Legendre transform. The inner
/// conjugates live on a dual grid wide enough for every slope of the
/// inputs, at the primal spacing.
///
/// Fails with [`Error::BoundTooSmall`] when the outer maximizer for a node
/// in the central half of the grid lands on the dual boundary.
pub fn proximal_average(phi: &GridFunction, phi_star_t: &GridFunction) -> Result<GridFunction> {
    check_pair(phi, phi_star_t)?;
    let grid = phi.grid();
    let h = grid.spacing();
    let lifted_a = phi.map_nodes(|x, y, v| v + half_sq(x, y))?;
    let lifted_b = phi_star_t.map_nodes(|x, y, v| v + half_sq(x, y))?;

    let reach = max_slope(&lifted_a).max(max_slope(&lifted_b)).max(grid.bound);
    let half_cells = (reach / h).ceil() as usize + 1;
    let dual = Grid::new(half_cells as f64 * h, 2 * half_cells + 1)?;

    let (ca, _) = conjugate_onto(&lifted_a, dual);
    let (cb, _) = conjugate_onto(&lifted_b, dual);
    let mixed: Vec<f64> = ca.values().iter().zip(cb.values()).map(|(a, b)| 0.5 * (a + b)).collect();
    let mixed = GridFunction::new(dual, mixed)?;

    let (outer, at_boundary) = conjugate_onto(&mixed, grid);
    let n = grid.resolution;
    let inner = grid.bound / 2.0;
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (grid.coordinate(i), grid.coordinate(j));
            if at_boundary[i * n + j] && x.abs() <= inner && y.abs() <= inner {
                return Err(Error::BoundTooSmall(format!(
                    "proximal-average maximizer at the dual boundary for node ({x}, {y})"
                )));
            }
        }
    }
    outer.map_nodes(|x, y, v| v - half_sq(x, y))
}

/// Direct evaluation
/// `Ψ(x) = min_y ½φ(y) + ½φ*ᵀ(2x − y) + ⅛‖2y − 2x‖²` over grid nodes `y`
/// with `2x − y` on the grid. Costs `O(N⁴)`; meant for small grids and as
/// an independent check of [`proximal_average`].
///
/// Nodes whose minimizer touches the grid edge while lying in the central
/// half of the grid are reported as [`Error::BoundTooSmall`].
pub fn proximal_average_direct(phi: &GridFunction, phi_star_t: &GridFunction) -> Result<GridFunction> {
    check_pair(phi, phi_star_t)?;
    let grid = phi.grid();
    let n = grid.resolution as isize;
    let xs = grid.coordinates();
    let mut values = Vec::with_capacity((n * n) as usize);
    for i in 0..n {
        for j in 0..n {
            let mut best = f64::INFINITY;
            let mut best_at = (0isize, 0isize);
            for k in 0..n {
                let zk = 2 * i - k;
                if zk < 0 || zk >= n {
                    continue;
                }
                for l in 0..n {
                    let zl = 2 * j - l;
                    if zl < 0 || zl >= n {
                        continue;
                    }
                    let (dy, dys) = (xs[k as usize] - xs[zk as usize], xs[l as usize] - xs[zl as usize]);
                    let v = 0.5 * phi.at(k as usize, l as usize)
                        + 0.5 * phi_star_t.at(zk as usize, zl as usize)
                        + 0.125 * (dy * dy + dys * dys);
                    if v < best {
                        best = v;
                        best_at = (k, l);
                    }
                }
            }
            let (x, y) = (xs[i as usize], xs[j as usize]);
            let edge = |k: isize| k == 0 || k == n - 1;
            let (k, l) = best_at;
            let touches = edge(k) || edge(l) || edge(2 * i - k) || edge(2 * j - l);
            if touches && x.abs() <= grid.bound / 2.0 && y.abs() <= grid.bound / 2.0 {
                return Err(Error::BoundTooSmall(format!(
                    "direct proximal-average minimizer on the grid edge for node ({x}, {y})"
                )));
            }
            values.push(best);
        }
    }
    GridFunction::new(grid, values)
}

fn check_pair(a: &GridFunction, b: &GridFunction) -> Result<()> {
    if a.grid() != b.grid() {
        return Err(Error::InvalidParameter(
            "proximal average needs both functions on the same grid".into(),
        ));
    }
    if a.resolution() < MIN_RESOLUTION {
        return Err(Error::ResolutionTooSmall(a.resolution()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_dual_quadratic_is_fixed() {
        let grid = Grid::new(2.0, 33).unwrap();
        let q = GridFunction::from_fn(grid, half_sq).unwrap();
        let p = proximal_average(&q, &q).unwrap();
        assert!(p.max_abs_difference(&q) < 1e-12);
    }

    #[test]
    fn self_dual_weighted_quadratic_is_fixed() {
        // ½(a x² + x*²/a) is its own transposed conjugate.
        let a = 2.0;
        let grid = Grid::new(2.0, 33).unwrap();
        let f = GridFunction::from_fn(grid, |x, y| 0.5 * (a * x * x + y * y / a)).unwrap();
        let p = proximal_average(&f, &f).unwrap();
        let h = grid.spacing();
        assert!(p.max_abs_difference(&f) <= h * h, "{}", p.max_abs_difference(&f));
    }

    #[test]
    fn direct_and_conjugate_routes_agree() {
        let grid = Grid::new(2.0, 17).unwrap();
        let a = GridFunction::from_fn(grid, |x, y| 0.3 * x * x + 0.2 * y * y + 0.1 * x * y).unwrap();
        let b = GridFunction::from_fn(grid, |x, y| 0.6 * x * x + 0.7 * y * y - 0.3 * x).unwrap();
        let fast = proximal_average(&a, &b).unwrap();
        let slow = proximal_average_direct(&a, &b).unwrap();
        let h = grid.spacing();
        let n = grid.resolution;
        let mut worst: f64 = 0.0;
        for i in n / 4..3 * n / 4 + 1 {
            for j in n / 4..3 * n / 4 + 1 {
                worst = worst.max((fast.at(i, j) - slow.at(i, j)).abs());
            }
        }
        assert!(worst <= h * h, "worst {worst}");
    }

    #[test]
    fn mismatched_grids_rejected() {
        let a = GridFunction::from_fn(Grid::new(1.0, 9).unwrap(), half_sq).unwrap();
        let b = GridFunction::from_fn(Grid::new(2.0, 9).unwrap(), half_sq).unwrap();
        assert!(proximal_average(&a, &b).is_err());
    }
}
