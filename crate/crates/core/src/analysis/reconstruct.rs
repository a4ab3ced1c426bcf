use serde::Serialize;

use crate::analysis::firmness::FirmnessReport;
use crate::base::FOperator;
use crate::error::Result;
use crate::monotone::{graph_monotonicity_check, GraphSample, MonotonicityReport};
use crate::point::Point;

/// Samples a map oracle at the given base points: `{(x, Tx)}`.
pub fn sample_map<T>(t: T, points: &[Point]) -> Result<GraphSample>
where
    T: Fn(&Point) -> Result<Point>,
{
    let pairs = points
        .iter()
        .map(|x| Ok((x.clone(), t(x)?)))
        .collect::<Result<Vec<_>>>()?;
    GraphSample::new(pairs)
}

/// `A_T = F T⁻¹ − F` on a sample `{(x, Tx)}`: returns `{(Tx, Fx − F Tx)}`.
pub fn reconstruct_at(t_graph: &GraphSample, f: &FOperator) -> Result<GraphSample> {
    let pairs = t_graph
        .pairs()
        .iter()
        .map(|(x, tx)| Ok((tx.clone(), &f.apply(x)? - &f.apply(tx)?)))
        .collect::<Result<Vec<_>>>()?;
    GraphSample::new(pairs)
}

#[derive(Debug, Clone, Serialize)]
pub struct ImplicationReport {
    pub firmness: FirmnessReport,
    pub monotonicity: MonotonicityReport,
    /// `firm ⇒ A_T monotone`.
    pub implication_holds: bool,
}

impl ImplicationReport {
    /// Whether `A_T` is monotone.
    pub fn monotone(&self) -> bool {
        self.monotonicity.is_monotone
    }
}

/// Runs the firmness test on all pairs of `t_graph` and the monotonicity
/// test on the reconstructed `A_T`, both at the monotonicity tolerance.
pub fn firm_implies_monotone_check(t_graph: &GraphSample, f: &FOperator) -> Result<ImplicationReport> {
    let monotonicity = graph_monotonicity_check(&reconstruct_at(t_graph, f)?);
    let pairs = t_graph.pairs();
    let mut images = Vec::with_capacity(pairs.len());
    for (x, tx) in pairs {
        images.push((f.apply(x)?, f.apply(tx)?));
    }
    let mut worst = f64::NEG_INFINITY;
    for i in 0..pairs.len() {
        for j in (i + 1)..pairs.len() {
            let dt = &pairs[i].1 - &pairs[j].1;
            let lhs = dt.dot(&(&images[i].1 - &images[j].1));
            let rhs = dt.dot(&(&images[i].0 - &images[j].0));
            worst = worst.max(lhs - rhs);
        }
    }
    if pairs.len() < 2 {
        worst = 0.0;
    }
    let tolerance = monotonicity.tolerance;
    let firmness = FirmnessReport {
        num_pairs: pairs.len() * pairs.len().saturating_sub(1) / 2,
        worst_violation: worst,
        tolerance,
        passing: worst <= tolerance,
    };
    Ok(ImplicationReport {
        implication_holds: !firmness.passing || monotonicity.is_monotone,
        firmness,
        monotonicity,
    })
}
