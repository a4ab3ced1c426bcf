use serde::Serialize;

use crate::error::{Error, Result};
use crate::point::Point;
use crate::potential::Potential;

/// `D(x, y) = f(x) − f(y) − ⟨x − y, ∇f(y)⟩`.
pub fn bregman_distance(f: &dyn Potential, x: &Point, y: &Point) -> Result<f64> {
    x.ensure_dim(y.dim())?;
    if !f.in_domain(x) || !f.in_domain(y) {
        return Err(Error::InvalidParameter(format!(
            "Bregman distance of `{}` undefined at {x}, {y}",
            f.name()
        )));
    }
    Ok(f.value(x) - f.value(y) - (x - y).dot(&f.gradient(y)))
}

#[derive(Debug, Clone, Serialize)]
pub struct DFirmReport {
    /// `[D(Tx,Ty) + D(Ty,Tx)] − [D(Tx,y) + D(Ty,x) − D(Tx,x) − D(Ty,y)]`.
    pub lhs_minus_rhs_d_form: f64,
    /// `⟨Tx−Ty, ∇f(Tx)−∇f(Ty)⟩ − ⟨Tx−Ty, ∇f(x)−∇f(y)⟩`.
    pub inner_product_form: f64,
    pub matches: bool,
}

/// Evaluates both sides of the exact identity relating the Bregman form of
/// D-firmness to its inner-product form. A mismatch beyond `1e−9` means
/// one of the evaluations is wrong.
pub fn dfirm_identity_check<T>(f: &dyn Potential, t: T, x: &Point, y: &Point) -> Result<DFirmReport>
where
    T: Fn(&Point) -> Result<Point>,
{
    let (tx, ty) = (t(x)?, t(y)?);
    let d = |a: &Point, b: &Point| bregman_distance(f, a, b);
    let d_form = d(&tx, &ty)? + d(&ty, &tx)? - (d(&tx, y)? + d(&ty, x)? - d(&tx, x)? - d(&ty, y)?);
    let dt = &tx - &ty;
    let ip_form = dt.dot(&(&f.gradient(&tx) - &f.gradient(&ty)))
        - dt.dot(&(&f.gradient(x) - &f.gradient(y)));
    Ok(DFirmReport {
        lhs_minus_rhs_d_form: d_form,
        inner_product_form: ip_form,
        matches: (d_form - ip_form).abs() <= 1e-9,
    })
}
