use crate::error::{Error, Result};
use crate::extension::grid::GridFunction;
use crate::monotone::GraphSample;

/// Default extraction threshold `5h²`.
pub fn default_eps(spacing: f64) -> f64 {
    5.0 * spacing * spacing
}

/// Points where `Ψ(x, x*) − x·x* ≤ eps`: for each grid `x`, the best `x*`
/// node, refined by a parabola through its neighbours.
pub fn extract_graph(psi: &GridFunction, eps: f64) -> Result<GraphSample> {
    Ok(extract_graph_with_adjustment(psi, eps)?.0)
}

/// Pool-adjacent-violators: the least-squares nondecreasing fit.
fn isotonic(values: &mut [f64]) {
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(values.len());
    for &v in values.iter() {
        blocks.push((v, 1));
        while blocks.len() >= 2 && blocks[blocks.len() - 2].0 > blocks[blocks.len() - 1].0 {
            let (b, nb) = blocks.pop().unwrap();
            let (a, na) = blocks.pop().unwrap();
            blocks.push(((a * na as f64 + b * nb as f64) / (na + nb) as f64, na + nb));
        }
    }
    let mut k = 0;
    for (v, n) in blocks {
        for slot in &mut values[k..k + n] {
            *slot = v;
        }
        k += n;
    }
}

/// Like [`extract_graph`], also returning the largest change made by the
/// final isotonic pass. Sub-grid refinement can reorder `x*` values by a
/// fraction of the spacing where the graph is flat; the pass restores a
/// nondecreasing sequence.
pub fn extract_graph_with_adjustment(psi: &GridFunction, eps: f64) -> Result<(GraphSample, f64)> {
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(Error::InvalidParameter(format!("eps {eps} must be non-negative")));
    }
    let grid = psi.grid();
    let n = grid.resolution;
    let h = grid.spacing();
    let xs = grid.coordinates();
    let mut pairs = Vec::new();
    let mut gaps = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            gaps[j] = psi.at(i, j) - xs[i] * xs[j];
        }
        let (j, g0) = gaps
            .iter()
            .cloned()
            .enumerate()
            .fold((0, f64::INFINITY), |best, (j, g)| if g < best.1 { (j, g) } else { best });
        if g0 > eps {
            continue;
        }
        let mut x_star = xs[j];
        if j > 0 && j + 1 < n {
            let (gm, gp) = (gaps[j - 1], gaps[j + 1]);
            let curv = gm - 2.0 * g0 + gp;
            if curv > 0.0 {
                x_star += (0.5 * (gm - gp) / curv).clamp(-0.5, 0.5) * h;
            }
        }
        pairs.push((xs[i], x_star));
    }
    if pairs.is_empty() {
        return Err(Error::EmptyExtraction);
    }
    let raw: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let mut fitted = raw.clone();
    isotonic(&mut fitted);
    let adjustment = raw.iter().zip(&fitted).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    for (p, v) in pairs.iter_mut().zip(fitted) {
        p.1 = v;
    }
    Ok((GraphSample::from_scalars(&pairs)?, adjustment))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::grid::Grid;

    #[test]
    fn identity_zero_set_is_the_diagonal() {
        let grid = Grid::new(2.0, 33).unwrap();
        let psi = GridFunction::from_fn(grid, |x, y| 0.5 * (x * x + y * y)).unwrap();
        let g = extract_graph(&psi, default_eps(grid.spacing())).unwrap();
        assert_eq!(g.len(), 33);
        for (u, us) in g.pairs() {
            assert!((u.coords()[0] - us.coords()[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn isotonic_pass_pools_violators() {
        let mut v = [0.0, 2.0, 1.0, 3.0, 2.5, 2.5, 4.0];
        isotonic(&mut v);
        assert_eq!(v, [0.0, 1.5, 1.5, 8.0 / 3.0, 8.0 / 3.0, 8.0 / 3.0, 4.0]);
    }

    #[test]
    fn nothing_below_threshold() {
        let grid = Grid::new(1.0, 9).unwrap();
        let psi = GridFunction::from_fn(grid, |x, y| x * y + 1.0).unwrap();
        assert!(matches!(extract_graph(&psi, 0.1), Err(Error::EmptyExtraction)));
    }
}
