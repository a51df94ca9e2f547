//! Sharpness construction in the supercritical regime `p > d`: the doubly
//! logarithmic radial field `u(x) = (ln 3)^{-1} ln ln (1/|x|)` on the ball of
//! radius `1/e` (d = 1, p = 2, delta = 1) has
//!
//! 1. finite functional value `I_{1,2}(u, B_{1/e})`, stable under quadrature
//!    refinement;
//! 2. the scaling identity `I(u_tau, B_{1/e}) = tau^{p-d} I(u, B_{tau/e})`
//!    for `u_tau(x) = u(tau x)`, with the value tending to zero, so the
//!    functional budget can be made arbitrarily small;
//! 3. a divergent exponential integral: with `gamma = 4 > 3` and
//!    `rho = ln 4 / ln 3 - 1 > 0`, the truncated integral
//!    `T(eps) = int_eps^{1/e} exp(alpha (ln 1/r)^{1+rho}) r^{d-1} dr`
//!    grows without bound, diagnosed by ceiling-crossing plus a sustained
//!    growth factor along `eps = 2^{-k}` (never by a claimed infinite value).

use crate::error::Result;
use crate::fields::ScalarField;
use crate::functional::{i_delta_radial, NonlocalParams};
use crate::geometry::Domain;
use crate::quad::{adaptive_simpson, QuadOptions};
use crate::report::VerificationReport;

use super::VerifyOptions;

const INV_E: f64 = 1.0 / std::f64::consts::E;
const LAMBDA: f64 = 3.0;
const GAMMA: f64 = 4.0;
const ALPHA: f64 = 1.0;
const D: usize = 1;
const P: f64 = 2.0;
const CEILING: f64 = 1e6;
const GROWTH: f64 = 1.1;

/// `T(eps)` in the log variable `t = ln 1/r`:
/// `int_1^{ln 1/eps} exp(alpha t^{1+rho} - d t) dt`.
fn truncated_exponential_integral(eps: f64, rho: f64) -> Result<f64> {
    let upper = (1.0 / eps).ln();
    let f = |t: f64| (ALPHA * t.powf(1.0 + rho) - D as f64 * t).exp();
    adaptive_simpson(&f, 1.0, upper, &QuadOptions::with_tol(1e-10))
}

pub fn verify(opt: &VerifyOptions) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("loglog");
    report.config_entry("seed", opt.seed);
    report.config_entry("effort", opt.effort);
    report.config_entry("d", D);
    report.config_entry("p", P);
    report.config_entry("lambda", LAMBDA);
    report.config_entry("gamma", GAMMA);
    report.config_entry("alpha", ALPHA);

    let field = ScalarField::loglog(LAMBDA)?;
    let ball = Domain::ball0(INV_E, D)?;
    let params = NonlocalParams::new(D, P, 1.0)?;

    // (1) finite value, stable under refinement
    let tols = [1e-3, 1e-4, 1e-5];
    let values: Vec<f64> = tols
        .iter()
        .map(|&t| Ok(i_delta_radial(&field, &ball, &params, t)?.value))
        .collect::<Result<_>>()?;
    for w in values.windows(2) {
        report.push_leq("finite-value/refinement-stability", (w[1] - w[0]).abs() / w[1], 0.01);
    }
    let i_value = *values.last().unwrap();
    report.constant("i_value", i_value);
    report.push_leq("finite-value/positive", 1e-6, i_value);

    // (2) scaling identity and decay of the budget
    let mut scaled_values = Vec::new();
    for &tau in &[0.5, 0.25, 0.125] {
        let u_tau = ScalarField::scaled(field.clone(), tau)?;
        let lhs = i_delta_radial(&u_tau, &ball, &params, 1e-5)?.value;
        let small_ball = Domain::ball0(tau * INV_E, D)?;
        let rhs = tau.powf(P - D as f64) * i_delta_radial(&field, &small_ball, &params, 1e-5)?.value;
        report.push_leq(
            format!("scaling-identity/tau={tau}"),
            (lhs / rhs - 1.0).abs(),
            0.05,
        );
        scaled_values.push((tau, lhs));
    }
    for w in scaled_values.windows(2) {
        report.push_leq(
            format!("scaling-decay/tau={}", w[1].0),
            w[1].1,
            w[0].1,
        );
    }
    let smallest = scaled_values.last().unwrap().1;
    report.constant("smallest_scaled_budget", smallest);
    report.push_leq("scaling-decay/below-demo-budget", smallest, 0.5 * i_value);

    // exponent arithmetic: rho > 0 and gamma^{u(r)} = (ln 1/r)^{1+rho}
    let rho = GAMMA.ln() / LAMBDA.ln() - 1.0;
    report.constant("rho", rho);
    report.push_leq("rho-positive", 0.01, rho);
    report.push_leq("rho-consistency", (LAMBDA.powf(1.0 + rho) - GAMMA).abs(), 1e-12);
    for &r in &[0.3, 0.1, 1e-3, 1e-8] {
        let g = field.eval(&[r, 0.0, 0.0], D)?;
        let direct = GAMMA.powf(g);
        let reduced = (1.0f64 / r).ln().powf(1.0 + rho);
        report.push_leq(
            format!("exponent-identity/r={r}"),
            (direct / reduced - 1.0).abs(),
            1e-12,
        );
    }

    // (3) divergence diagnostics for T(eps)
    let k_max = 40;
    let ts: Vec<f64> = (1..=k_max)
        .map(|k| truncated_exponential_integral(2f64.powi(-k), rho))
        .collect::<Result<_>>()?;
    report.push_leq("divergence/ceiling", CEILING, *ts.last().unwrap());
    for k in (k_max as usize - 5)..(k_max as usize) {
        report.push_leq(
            format!("divergence/growth-factor/k={}", k + 1),
            GROWTH * ts[k - 1],
            ts[k],
        );
    }
    report.constant("t_final", *ts.last().unwrap());

    report.finish_by_margins();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Status;

    #[test]
    fn loglog_counterexample_holds() {
        let report = verify(&VerifyOptions::default()).unwrap();
        assert_eq!(report.status, Status::Holds, "{}", report.render_text());
        assert!(report.measured_constants["t_final"] > CEILING);
        assert!(report.measured_constants["rho"] > 0.26 && report.measured_constants["rho"] < 0.27);
    }
}
