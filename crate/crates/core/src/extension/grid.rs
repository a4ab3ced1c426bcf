use serde::Serialize;

use crate::error::{Error, Result};

/// A uniform axis `{−B + 2B·i/(N−1) : i = 0..N}` shared by both variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub bound: f64,
    pub resolution: usize,
}

impl Grid {
    pub fn new(bound: f64, resolution: usize) -> Result<Self> {
        if !(bound.is_finite() && bound > 0.0) {
            return Err(Error::InvalidParameter(format!("grid bound {bound} must be positive")));
        }
        if resolution < 3 || resolution.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "grid resolution {resolution} must be odd and >= 3"
            )));
        }
        Ok(Grid { bound, resolution })
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.bound / (self.resolution - 1) as f64
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        -self.bound + self.spacing() * i as f64
    }

    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.resolution).map(|i| self.coordinate(i)).collect()
    }

    /// Cell index `i` and fraction `t ∈ [0, 1]` with `v = x_i + t·h`.
    pub(crate) fn locate(&self, v: f64) -> Option<(usize, f64)> {
        let h = self.spacing();
        let r = (v + self.bound) / h;
        let last = (self.resolution - 1) as f64;
        if !(r >= -1e-9 && r <= last + 1e-9) {
            return None;
        }
        let r = r.clamp(0.0, last);
        let i = (r.floor() as usize).min(self.resolution - 2);
        Some((i, r - i as f64))
    }
}

/// Values of a bivariate function on `Grid × Grid`, row-major with the
/// first variable as row index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.resolution * grid.resolution {
            return Err(Error::InvalidParameter(format!(
                "expected {} grid values, got {}",
                grid.resolution * grid.resolution,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("grid values"));
        }
        Ok(GridFunction { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let xs = grid.coordinates();
        let mut values = Vec::with_capacity(xs.len() * xs.len());
        for &x in &xs {
            for &y in &xs {
                values.push(f(x, y));
            }
        }
        GridFunction::new(grid, values)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn bound(&self) -> f64 {
        self.grid.bound
    }

    pub fn resolution(&self) -> usize {
        self.grid.resolution
    }

    pub fn spacing(&self) -> f64 {
        self.grid.spacing()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.resolution + j]
    }

    /// `(x, x*) ↦ f(x*, x)`.
    pub fn transpose(&self) -> GridFunction {
        let n = self.grid.resolution;
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                values[j * n + i] = self.values[i * n + j];
            }
        }
        GridFunction { grid: self.grid, values }
    }

    /// Adds `g(x, x*)` evaluated at the nodes.
    pub fn map_nodes(&self, g: impl Fn(f64, f64, f64) -> f64) -> Result<GridFunction> {
        let n = self.grid.resolution;
        let xs = self.grid.coordinates();
        let mut values = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                values.push(g(xs[i], xs[j], self.values[i * n + j]));
            }
        }
        GridFunction::new(self.grid, values)
    }

    /// Bilinear interpolation; `None` outside the grid.
    pub fn interpolate(&self, x: f64, x_star: f64) -> Option<f64> {
        let (i, s) = self.grid.locate(x)?;
        let (j, t) = self.grid.locate(x_star)?;
        let f00 = self.at(i, j);
        let f01 = self.at(i, j + 1);
        let f10 = self.at(i + 1, j);
        let f11 = self.at(i + 1, j + 1);
        Some((1.0 - s) * ((1.0 - t) * f00 + t * f01) + s * ((1.0 - t) * f10 + t * f11))
    }

    /// Smallest second difference along rows and columns.
    pub fn min_second_difference(&self) -> f64 {
        let n = self.grid.resolution;
        let mut worst = f64::INFINITY;
        for i in 0..n {
            for j in 1..n - 1 {
                worst = worst.min(self.at(i, j - 1) - 2.0 * self.at(i, j) + self.at(i, j + 1));
                worst = worst.min(self.at(j - 1, i) - 2.0 * self.at(j, i) + self.at(j + 1, i));
            }
        }
        worst
    }

    /// Whether the function is convex along grid lines up to `tol`.
    pub fn is_convex_along_lines(&self, tol: f64) -> bool {
        self.min_second_difference() >= -tol
    }

    pub fn max_abs_difference(&self, other: &GridFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}
