use crate::error::{Error, Result};
use crate::monotone::GraphSample;

/// Fitzpatrick function of a finite 1-D monotone sample:
/// `Φ(x, x*) = max over (u, u*) of (x·u* + u·x* − u·u*)`.
#[derive(Debug, Clone)]
pub struct Fitzpatrick1d {
    pieces: Vec<(f64, f64)>,
}

impl Fitzpatrick1d {
    pub fn new(g: &GraphSample) -> Result<Self> {
        if g.dim() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, got: g.dim() });
        }
        let pieces = g.pairs().iter().map(|(u, us)| (u.coords()[0], us.coords()[0])).collect();
        Ok(Fitzpatrick1d { pieces })
    }

    pub fn eval(&self, x: f64, x_star: f64) -> f64 {
        self.pieces
            .iter()
            .map(|&(u, us)| x * us + u * x_star - u * us)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest absolute coordinate over the sample.
    pub fn max_abs_coordinate(&self) -> f64 {
        self.pieces.iter().fold(0.0, |m, &(u, us)| m.max(u.abs()).max(us.abs()))
    }
}

/// `Φ_G(x, x*)` for a 1-D sample `G`.
pub fn fitzpatrick_eval(g: &GraphSample, x: f64, x_star: f64) -> Result<f64> {
    Ok(Fitzpatrick1d::new(g)?.eval(x, x_star))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_zero_pair_is_zero() {
        let g = GraphSample::from_scalars(&[(0.0, 0.0)]).unwrap();
        for (x, y) in [(1.0, 2.0), (-3.0, 0.5), (0.0, 0.0)] {
            assert_eq!(fitzpatrick_eval(&g, x, y).unwrap(), 0.0);
        }
    }

    #[test]
    fn identity_sample_at_one_one() {
        let g = GraphSample::from_scalars(&[(-1.0, -1.0), (0.0, 0.0), (1.0, 1.0)]).unwrap();
        let pieces = [-1.0 - 1.0 - 1.0, 0.0, 1.0 + 1.0 - 1.0f64];
        let expected = pieces.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(fitzpatrick_eval(&g, 1.0, 1.0).unwrap(), expected);
        assert_eq!(expected, 1.0);
    }

    #[test]
    fn pairing_on_graph_points() {
        let data = [(-2.0, -3.0), (-0.5, 0.0), (0.0, 0.25), (1.0, 4.0)];
        let g = GraphSample::from_scalars(&data).unwrap();
        for &(u, us) in &data {
            assert!((fitzpatrick_eval(&g, u, us).unwrap() - u * us).abs() < 1e-15);
        }
    }
}
