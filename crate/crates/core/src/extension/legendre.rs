use crate::error::{Error, Result};
use crate::extension::grid::{Grid, GridFunction};

/// Smallest grid resolution accepted by the conjugation routines.
pub const MIN_RESOLUTION: usize = 9;

/// Exact discrete Legendre transform in one variable:
/// `out[k] = max_i (xs[i]·slopes[k] − fs[i])` with its maximizing index.
///
/// `xs` and `slopes` must be increasing. Runs in `O(n + m)` through the
/// lower convex hull of the samples.
pub fn legendre_1d(xs: &[f64], fs: &[f64], slopes: &[f64], out: &mut [f64], argmax: &mut [usize]) {
    debug_assert_eq!(xs.len(), fs.len());
    debug_assert_eq!(slopes.len(), out.len());
    let mut hull: Vec<usize> = Vec::with_capacity(xs.len());
    for i in 0..xs.len() {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // drop b when it lies on or above the chord from a to i
            let cross = (fs[b] - fs[a]) * (xs[i] - xs[a]) - (fs[i] - fs[a]) * (xs[b] - xs[a]);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    let mut k = 0;
    for (s_idx, &s) in slopes.iter().enumerate() {
        while k + 1 < hull.len() {
            let (a, b) = (hull[k], hull[k + 1]);
            let edge = (fs[b] - fs[a]) / (xs[b] - xs[a]);
            if edge < s {
                k += 1;
            } else {
                break;
            }
        }
        let i = hull[k];
        out[s_idx] = xs[i] * s - fs[i];
        argmax[s_idx] = i;
    }
}

/// `f*(s, t) = max over nodes of (x·s + x*·t − f(x, x*))` on the output
/// grid, with a flag per output node telling whether the maximizer sits on
/// the boundary of the input grid.
pub(crate) fn conjugate_onto(f: &GridFunction, out_grid: Grid) -> (GridFunction, Vec<bool>) {
    let n = f.resolution();
    let m = out_grid.resolution;
    let xs = f.grid().coordinates();
    let ts = out_grid.coordinates();

    // Pass 1: k(i, t) = max_j (x*_j t − f(x_i, x*_j)).
    let mut inner = vec![0.0; n * m];
    let mut inner_arg = vec![0usize; n * m];
    for i in 0..n {
        let row = &f.values()[i * n..(i + 1) * n];
        legendre_1d(&xs, row, &ts, &mut inner[i * m..(i + 1) * m], &mut inner_arg[i * m..(i + 1) * m]);
    }

    // Pass 2: f*(s, t) = max_i (x_i s − (−k(i, t))).
    let mut values = vec![0.0; m * m];
    let mut boundary = vec![false; m * m];
    let mut column = vec![0.0; n];
    let mut col_out = vec![0.0; m];
    let mut col_arg = vec![0usize; m];
    for b in 0..m {
        for i in 0..n {
            column[i] = -inner[i * m + b];
        }
        legendre_1d(&xs, &column, &ts, &mut col_out, &mut col_arg);
        for a in 0..m {
            let i = col_arg[a];
            let j = inner_arg[i * m + b];
            values[a * m + b] = col_out[a];
            boundary[a * m + b] = i == 0 || i == n - 1 || j == 0 || j == n - 1;
        }
    }
    let g = GridFunction::new(out_grid, values).expect("conjugate of finite data is finite");
    (g, boundary)
}

/// The transposed conjugate `(x, x*) ↦ f*(x*, x)` on the input grid.
pub fn conjugate_2d(f: &GridFunction) -> Result<GridFunction> {
    if f.resolution() < MIN_RESOLUTION {
        return Err(Error::ResolutionTooSmall(f.resolution()));
    }
    let (g, _) = conjugate_onto(f, f.grid());
    Ok(g.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_1d(xs: &[f64], fs: &[f64], s: f64) -> f64 {
        xs.iter().zip(fs).map(|(x, f)| x * s - f).fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn matches_brute_force_on_nonconvex_data() {
        let xs: Vec<f64> = (0..40).map(|i| -2.0 + 0.1 * i as f64).collect();
        let fs: Vec<f64> = xs.iter().map(|x| (3.0 * x).sin() + 0.3 * x * x).collect();
        let slopes: Vec<f64> = (0..61).map(|k| -6.0 + 0.2 * k as f64).collect();
        let mut out = vec![0.0; slopes.len()];
        let mut arg = vec![0; slopes.len()];
        legendre_1d(&xs, &fs, &slopes, &mut out, &mut arg);
        for (k, &s) in slopes.iter().enumerate() {
            let b = brute_1d(&xs, &fs, s);
            assert!((out[k] - b).abs() < 1e-12, "slope {s}: {} vs {b}", out[k]);
            assert!((xs[arg[k]] * s - fs[arg[k]] - b).abs() < 1e-12);
        }
    }

    #[test]
    fn quadratic_is_self_conjugate_at_nodes() {
        let grid = Grid::new(2.0, 17).unwrap();
        let q = GridFunction::from_fn(grid, |x, y| 0.5 * (x * x + y * y)).unwrap();
        let c = conjugate_2d(&q).unwrap();
        assert!(c.max_abs_difference(&q) < 1e-12);
    }

    #[test]
    fn point_mass_conjugates_to_linear() {
        let grid = Grid::new(1.0, 9).unwrap();
        let (a, b) = (grid.coordinate(6), grid.coordinate(2));
        let f = GridFunction::from_fn(grid, |x, y| {
            if x == a && y == b { 0.0 } else { 1e6 }
        })
        .unwrap();
        let c = conjugate_2d(&f).unwrap();
        // transposed: c(x, x*) = f*(x*, x) = a·x* + b·x
        let expect = GridFunction::from_fn(grid, |x, y| a * y + b * x).unwrap();
        assert!(c.max_abs_difference(&expect) < 1e-12);
    }

    #[test]
    fn too_coarse_rejected() {
        let grid = Grid::new(1.0, 7).unwrap();
        let f = GridFunction::from_fn(grid, |_, _| 0.0).unwrap();
        assert!(matches!(conjugate_2d(&f), Err(Error::ResolutionTooSmall(7))));
    }
}
