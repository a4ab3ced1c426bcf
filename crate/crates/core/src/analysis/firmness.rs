use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::base::FOperator;
use crate::error::Result;
use crate::point::{Point, BASE_TOL};

pub const DEFAULT_PAIRS: usize = 1000;

/// Outcome of sampling `⟨Tx − Ty, FTx − FTy⟩ ≤ ⟨Tx − Ty, Fx − Fy⟩`.
///
/// A failing report is an exact certificate; a passing one is statistical.
#[derive(Debug, Clone, Serialize)]
pub struct FirmnessReport {
    pub num_pairs: usize,
    /// Max over pairs of `⟨Tx−Ty, FTx−FTy⟩ − ⟨Tx−Ty, Fx−Fy⟩`.
    pub worst_violation: f64,
    pub tolerance: f64,
    pub passing: bool,
}

/// Pairs of points with coordinates uniform in `[−radius, radius]`.
pub fn random_pairs(dim: usize, count: usize, radius: f64, seed: u64) -> Vec<(Point, Point)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || {
        Point::from_vector(DVector::from_fn(dim, |_, _| rng.gen_range(-radius..=radius)))
    };
    (0..count).map(|_| (draw(), draw())).collect()
}

fn violations<T>(t: &T, f: &FOperator, pairs: &[(Point, Point)]) -> Result<(f64, f64)>
where
    T: Fn(&Point) -> Result<Point>,
{
    let mut worst = f64::NEG_INFINITY;
    let mut scale: f64 = 1.0;
    for (x, y) in pairs {
        let (tx, ty) = (t(x)?, t(y)?);
        let dt = &tx - &ty;
        let lhs = dt.dot(&(&f.apply(&tx)? - &f.apply(&ty)?));
        let rhs = dt.dot(&(&f.apply(x)? - &f.apply(y)?));
        worst = worst.max(lhs - rhs);
        scale = scale.max(lhs.abs() + rhs.abs());
    }
    if pairs.is_empty() {
        worst = 0.0;
    }
    Ok((worst, scale))
}

/// Checks F-firm nonexpansiveness of `t` with the default relative
/// tolerance `1e−10 · max(1, |lhs| + |rhs|)`.
pub fn firmness_check<T>(t: T, f: &FOperator, pairs: &[(Point, Point)]) -> Result<FirmnessReport>
where
    T: Fn(&Point) -> Result<Point>,
{
    let (worst, scale) = violations(&t, f, pairs)?;
    let tolerance = BASE_TOL * scale;
    Ok(FirmnessReport {
        num_pairs: pairs.len(),
        worst_violation: worst,
        tolerance,
        passing: worst <= tolerance,
    })
}

/// Same as [`firmness_check`] with an absolute tolerance.
pub fn firmness_check_tol<T>(
    t: T,
    f: &FOperator,
    pairs: &[(Point, Point)],
    tolerance: f64,
) -> Result<FirmnessReport>
where
    T: Fn(&Point) -> Result<Point>,
{
    let (worst, _) = violations(&t, f, pairs)?;
    Ok(FirmnessReport {
        num_pairs: pairs.len(),
        worst_violation: worst,
        tolerance,
        passing: worst <= tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monotone::MonotoneOperator;
    use crate::pt;
    use crate::resolvent::resolvent_apply;

    #[test]
    fn half_identity_is_firm() {
        let f = FOperator::identity(2).unwrap();
        let pairs = random_pairs(2, 500, 3.0, 1);
        let rep = firmness_check(|x| Ok(x * 0.5), &f, &pairs).unwrap();
        assert!(rep.passing);
        assert_eq!(rep.num_pairs, 500);
    }

    #[test]
    fn doubling_violates_by_two() {
        let f = FOperator::identity(2).unwrap();
        let pairs = vec![(Point::zeros(2), pt![1, 0])];
        let rep = firmness_check(|x| Ok(x * 2.0), &f, &pairs).unwrap();
        assert_eq!(rep.worst_violation, 2.0);
        assert!(!rep.passing);
    }

    #[test]
    fn rotator_resolvent_is_rotator_firm() {
        let f = FOperator::rotator(1.1).unwrap();
        let a = MonotoneOperator::identity(2).unwrap();
        let pairs = random_pairs(2, 1000, 4.0, 2);
        let rep = firmness_check(|x| Ok(resolvent_apply(&a, &f, x)?.output), &f, &pairs).unwrap();
        assert!(rep.passing, "{rep:?}");
    }
}
