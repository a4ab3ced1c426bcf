//! The default invariant suite behind the `check` command.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::{
    contraction_iterate, dfirm_identity_check, firm_implies_monotone_check, inverse_resolvent_linear,
    minty_forward, minty_inverse, sample_map,
};
use crate::base::FOperator;
use crate::error::Result;
use crate::extension::{extend, GridParams};
use crate::monotone::{GraphSample, MonotoneOperator};
use crate::point::Point;
use crate::potential::BuiltinPotential;
use crate::projector::{ball_alpha, ConvexSet, ProjectorSpec};
use crate::resolvent::{
    kp_limit_check, kp_residual, kp_solve, maximality_probe, resolvent_apply, resolvent_numeric,
    rotator_resolvent_matrix,
};
use crate::solver::SolverOptions;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

fn p2(a: f64, b: f64) -> Point {
    Point::new(vec![a, b]).expect("finite")
}

fn draw(rng: &mut ChaCha8Rng, dim: usize, r: f64) -> Point {
    Point::new((0..dim).map(|_| rng.gen_range(-r..=r)).collect()).expect("finite")
}

fn rotator_closed_form() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    let a = MonotoneOperator::identity(2)?;
    for theta in [0.0, PI / 6.0, PI / 4.0, PI / 3.0, 1.5] {
        let f = FOperator::rotator(theta)?;
        let m = rotator_resolvent_matrix(theta);
        for (j, e) in [p2(1.0, 0.0), p2(0.0, 1.0)].iter().enumerate() {
            let y = resolvent_numeric(&a, &f, e, &SolverOptions::default())?.output;
            for i in 0..2 {
                worst = worst.max((y.coords()[i] - m[(i, j)]).abs());
            }
        }
    }
    Ok((worst <= 1e-10, format!("max entry error {worst:e}")))
}

fn projectors(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut line_err: f64 = 0.0;
    let mut ball_err: f64 = 0.0;
    for theta in [0.0, 0.4, 1.2] {
        let f = FOperator::rotator(theta)?;
        let line = ProjectorSpec::new(ConvexSet::HorizontalLine, f.clone())?;
        let ball = ProjectorSpec::unit_ball(f)?;
        for _ in 0..100 {
            let x = draw(rng, 2, 5.0);
            let y = line.project(&x)?;
            let c = x.coords();
            line_err = line_err.max(y.distance(&p2(c[0] - c[1] * theta.tan(), 0.0)));
            if x.norm() > 1.0 {
                let y = ball.project(&x)?;
                let alpha = ball_alpha(theta, x.norm());
                let eq = alpha * alpha + 2.0 * alpha * theta.cos() + 1.0 - x.norm_squared();
                ball_err = ball_err.max((y.norm() - 1.0).abs()).max(eq.abs());
            }
        }
    }
    Ok((
        line_err <= 1e-12 && ball_err <= 1e-10,
        format!("line error {line_err:e}, ball error {ball_err:e}"),
    ))
}

fn kp(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for p in [1.1, 2.0, 3.0, 10.0] {
        for _ in 0..50 {
            let x = draw(rng, 2, 3.0);
            worst = worst.max(kp_residual(p, &x, kp_solve(p, &x)).abs());
        }
    }
    let half = (kp_solve(2.0, &p2(1.7, -0.3)) - 0.5).abs();
    let limits = kp_limit_check(&p2(0.8, 0.9)).passed() && kp_limit_check(&p2(2.0, -1.0)).passed();
    Ok((
        worst <= 1e-13 && half <= 1e-13 && limits,
        format!("max residual {worst:e}, |k₂ − ½| {half:e}, limits {limits}"),
    ))
}

fn firm_monotone(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let f = FOperator::identity(2)?;
    let pts: Vec<Point> = (0..20).map(|_| draw(rng, 2, 2.0)).collect();
    let mut counterexamples = 0;
    for theta in [0.3, 0.9] {
        let fr = FOperator::rotator(theta)?;
        let a = MonotoneOperator::normal_cone_ball(p2(0.0, 0.0), 1.0)?;
        let g = sample_map(|x| Ok(resolvent_apply(&a, &fr, x)?.output), &pts)?;
        if !firm_implies_monotone_check(&g, &fr)?.implication_holds {
            counterexamples += 1;
        }
    }
    let doubled = firm_implies_monotone_check(&sample_map(|x| Ok(x * 2.0), &pts)?, &f)?;
    let rejected = !doubled.firmness.passing && !doubled.monotone();
    Ok((
        counterexamples == 0 && rejected,
        format!("counterexamples {counterexamples}, 2Id rejected {rejected}"),
    ))
}

fn minty(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    let pairs = [
        (MonotoneOperator::identity(2)?, FOperator::identity(2)?),
        (MonotoneOperator::identity(2)?, FOperator::rotator(PI / 4.0)?),
        (MonotoneOperator::identity(2)?, FOperator::p_norm_gradient(3.0, 2)?),
        (MonotoneOperator::normal_cone_ball(p2(0.0, 0.0), 1.0)?, FOperator::rotator(PI / 4.0)?),
    ];
    for (a, f) in &pairs {
        for _ in 0..50 {
            let x = draw(rng, 2, 3.0);
            let m = minty_forward(a, f, &x)?;
            let back = minty_inverse(f, &m.graph_point.0, &m.graph_point.1)?;
            worst = worst.max(back.distance(&x) / x.norm().max(1.0));
        }
    }
    Ok((worst <= 1e-9, format!("max round-trip error {worst:e}")))
}

fn inverse_identity(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let a = MonotoneOperator::normal_cone_ball(p2(0.0, 0.0), 1.0)?;
    let f = FOperator::identity(2)?;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let x = draw(rng, 2, 3.0);
        let lhs = inverse_resolvent_linear(&a, &f, &x)?;
        let rhs = &x - &resolvent_apply(&a, &f, &x)?.output;
        worst = worst.max(lhs.distance(&rhs));
    }
    Ok((worst == 0.0, format!("max deviation from Id − T_A {worst:e}")))
}

fn contraction() -> Result<(bool, String)> {
    let tr = contraction_iterate(&FOperator::identity(2)?, &p2(1.0, 0.0), 1000, 1e-12)?;
    let rot = contraction_iterate(&FOperator::rotator(1.2)?, &p2(0.3, -2.0), 1000, 1e-12);
    Ok((
        tr.len() == 41 && tr.converged && rot.is_ok(),
        format!("identity trace length {}, rotator bound respected {}", tr.len(), rot.is_ok()),
    ))
}

fn extension() -> Result<(bool, String)> {
    let data: Vec<(f64, f64)> = [-1.0, -0.5, 0.0, 0.5, 1.0].iter().map(|&x| (x, 0.5 * x)).collect();
    let g = GraphSample::from_scalars(&data)?;
    let r = extend(&g, &FOperator::identity(1)?, GridParams::new(4.0, 129))?;
    let d = &r.diagnostics;
    Ok((
        d.max_agreement_error <= 1e-3 && d.extracted_monotone,
        format!("agreement error {:e}, extracted {} points", d.max_agreement_error, d.extracted_points),
    ))
}

fn dfirm(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    let t = |x: &Point| Ok(x * 0.5);
    for pot in [BuiltinPotential::HalfSquaredNorm, BuiltinPotential::QuarticNorm] {
        for _ in 0..100 {
            let (x, y) = (draw(rng, 2, 2.0), draw(rng, 2, 2.0));
            let r = dfirm_identity_check(&pot, t, &x, &y)?;
            worst = worst.max((r.lhs_minus_rhs_d_form - r.inner_product_form).abs());
        }
    }
    for _ in 0..100 {
        let x = Point::new(vec![rng.gen_range(0.1..3.0)])?;
        let y = Point::new(vec![rng.gen_range(0.1..3.0)])?;
        let r = dfirm_identity_check(&BuiltinPotential::NegativeEntropy, t, &x, &y)?;
        worst = worst.max((r.lhs_minus_rhs_d_form - r.inner_product_form).abs());
    }
    Ok((worst <= 1e-9, format!("max identity mismatch {worst:e}")))
}

fn probe(seed: u64) -> Result<(bool, String)> {
    let f = FOperator::rotator(0.6)?;
    let maximal = [
        MonotoneOperator::identity(2)?,
        MonotoneOperator::zero(2)?,
        MonotoneOperator::normal_cone_ball(p2(0.5, 0.0), 2.0)?,
        MonotoneOperator::normal_cone_line(),
    ];
    let mut worst: f64 = 1.0;
    for a in &maximal {
        worst = worst.min(maximality_probe(a, &f, 100, 3.0, seed)?.success_rate);
    }
    let pts: Vec<(f64, f64)> = (-2..=2).map(|i| (i as f64 * 0.5, i as f64 * 0.5)).collect();
    let truncated = MonotoneOperator::from_graph(GraphSample::from_scalars(&pts)?)?;
    let rate = maximality_probe(&truncated, &FOperator::identity(1)?, 100, 5.0, seed)?.success_rate;
    Ok((
        worst == 1.0 && rate < 0.9,
        format!("closed-form minimum rate {worst}, truncated identity rate {rate}"),
    ))
}

/// Runs every check; a check that errors counts as failed.
pub fn run_default_suite(seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    let mut record = |name: &str, r: Result<(bool, String)>| {
        let (passed, detail) = r.unwrap_or_else(|e| (false, format!("error: {e}")));
        checks.push(CheckResult { name: name.to_string(), passed, detail });
    };
    record("rotator_resolvent_closed_form", rotator_closed_form());
    record("projector_formulas", projectors(&mut rng));
    record("kp_resolvent", kp(&mut rng));
    record("firm_implies_monotone", firm_monotone(&mut rng));
    record("minty_round_trip", minty(&mut rng));
    record("inverse_resolvent_identity", inverse_identity(&mut rng));
    record("contraction", contraction());
    record("extension_half_identity", extension());
    record("dfirm_identity", dfirm(&mut rng));
    record("maximality_probe", probe(seed));
    let passed = checks.iter().all(|c| c.passed);
    SuiteReport { seed, passed, checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_passes() {
        let rep = run_default_suite(0);
        for c in &rep.checks {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
