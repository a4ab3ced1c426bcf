use serde::Serialize;

use crate::base::FOperator;
use crate::error::{Error, Result};
use crate::monotone::{MonotoneForm, MonotoneOperator};
use crate::point::Point;
use crate::resolvent::resolvent_apply;

/// The `F⁻¹`-resolvent of `A⁻¹` for linear `F`, via
/// `T_{A⁻¹} = Id − F T_A F⁻¹`.
pub fn inverse_resolvent_linear(a: &MonotoneOperator, f: &FOperator, x_star: &Point) -> Result<Point> {
    if !f.is_linear() {
        return Err(Error::Unsupported("inverse-resolvent identity needs a linear F".into()));
    }
    let inner = resolvent_apply(a, f, &f.inverse(x_star)?)?.output;
    Ok(x_star - &f.apply(&inner)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct FixedPointReport {
    /// `F(F⁻¹x* − T_A(F⁻¹(y* + F(F⁻¹x* − F⁻¹y*))))`.
    pub rhs: Point,
    pub residual: f64,
    pub matches: bool,
}

/// Evaluates the fixed-point characterization of `y* = T_{A⁻¹} x*`, which
/// holds for any admissible `F`. Only closed-form operators are accepted:
/// for sampled ones `dom T_{A⁻¹}` is unknown.
pub fn inverse_resolvent_fixed_point_check(
    a: &MonotoneOperator,
    f: &FOperator,
    x_star: &Point,
    y_star: &Point,
) -> Result<FixedPointReport> {
    if matches!(a.form(), MonotoneForm::FromGraph(_)) {
        return Err(Error::UnknownDomain);
    }
    let x = f.inverse(x_star)?;
    let y = f.inverse(y_star)?;
    let shifted = y_star + &f.apply(&(&x - &y))?;
    let t = resolvent_apply(a, f, &f.inverse(&shifted)?)?.output;
    let rhs = f.apply(&(&x - &t))?;
    let residual = rhs.distance(y_star);
    let scale = x_star.norm().max(y_star.norm()).max(1.0);
    Ok(FixedPointReport { matches: residual <= 1e-8 * scale, rhs, residual })
}
