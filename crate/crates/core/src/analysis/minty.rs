use serde::Serialize;

use crate::base::FOperator;
use crate::error::{Error, Result};
use crate::monotone::MonotoneOperator;
use crate::point::Point;
use crate::resolvent::{resolvent_apply, satisfies_resolvent_relation};

/// `Ψ(x) = (T_A x, Fx − F T_A x)`, a point of `gra A`.
#[derive(Debug, Clone, Serialize)]
pub struct MintyPair {
    pub base_point: Point,
    pub graph_point: (Point, Point),
}

/// Maps `x ∈ dom T_A` to the graph of `A`, checking membership.
pub fn minty_forward(a: &MonotoneOperator, f: &FOperator, x: &Point) -> Result<MintyPair> {
    let y = resolvent_apply(a, f, x)?.output;
    let ys = &f.apply(x)? - &f.apply(&y)?;
    if !satisfies_resolvent_relation(a, f, x, &y)? {
        return Err(Error::InternalConsistency(format!(
            "Minty image ({y}, {ys}) of {x} is not in gra A"
        )));
    }
    Ok(MintyPair { base_point: x.clone(), graph_point: (y, ys) })
}

/// `Ψ⁻¹(u, u*) = F⁻¹(u* + Fu)`.
pub fn minty_inverse(f: &FOperator, u: &Point, u_star: &Point) -> Result<Point> {
    f.inverse(&(u_star + &f.apply(u)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pt;
    use crate::resolvent::rotator_resolvent_matrix;

    #[test]
    fn identity_pair() {
        let a = MonotoneOperator::identity(2).unwrap();
        let f = FOperator::identity(2).unwrap();
        let m = minty_forward(&a, &f, &pt![2, 0]).unwrap();
        assert_eq!(m.graph_point, (pt![1, 0], pt![1, 0]));
        assert_eq!(minty_inverse(&f, &pt![1, 0], &pt![1, 0]).unwrap(), pt![2, 0]);
    }

    #[test]
    fn zero_operator_pair() {
        let a = MonotoneOperator::zero(2).unwrap();
        let f = FOperator::p_norm_gradient(3.0, 2).unwrap();
        let x = pt![0.4, -1.2];
        let m = minty_forward(&a, &f, &x).unwrap();
        assert_eq!(m.graph_point.0, x);
        assert!(m.graph_point.1.is_zero());
        assert!(minty_inverse(&f, &x, &Point::zeros(2)).unwrap().approx_eq(&x));
    }

    #[test]
    fn rotator_pair_and_round_trip() {
        let theta = 0.7;
        let a = MonotoneOperator::identity(2).unwrap();
        let f = FOperator::rotator(theta).unwrap();
        let x = pt![1.3, -0.2];
        let m = minty_forward(&a, &f, &x).unwrap();
        let mx = Point::new((rotator_resolvent_matrix(theta) * x.as_vector()).as_slice().to_vec())
            .unwrap();
        assert!(m.graph_point.0.approx_eq(&mx));
        let expected = &f.apply(&x).unwrap() - &f.apply(&mx).unwrap();
        assert!(m.graph_point.1.approx_eq(&expected));
        let back = minty_inverse(&f, &m.graph_point.0, &m.graph_point.1).unwrap();
        assert!(back.approx_eq_tol(&x, 1e-12));
    }
}
