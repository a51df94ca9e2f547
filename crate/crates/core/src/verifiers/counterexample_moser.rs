//! Sharpness construction in the critical regime `p = d`: the plateau-log
//! sequence `g_n` (value `(ln n)^{1/q}` on `[0, 1/n]`, then
//! `ln(1/r) / (ln n)^{1/q'}` out to `1/e`) with `d = 1`, `q = 1.5`,
//! `gamma = 2`, `alpha = 1`, `delta = 1` satisfies
//!
//! 1. the functional decomposition `I_{1,1}(g_n, I) = 2 J_cross + J_far`
//!    over plateau-to-slope and slope-to-slope pairs, with closed-form
//!    antiderivatives that match independent quadrature;
//! 2. the cross term is below `ln(a_n / (a_n - 1/n))` and the far term below
//!    `2 ln(n / (e b_n)) / (b_n - 1)`, where `a_n = e^{(ln n)^{1/q'}} / n`
//!    and `b_n = e^{(ln n)^{1/q'}}`;
//! 3. `I_{1,1}(g_n, I) -> 0`: the closed form — verified against quadrature
//!    at desk-scale n — is evaluated along a grid of `ln n`; the value peaks
//!    near `ln n ~ 27` and then decreases monotonically toward zero, so the
//!    decay is asserted beyond the peak (at `n = 10^3..10^5` the sequence is
//!    still on the rising side, which the report records rather than hides);
//! 4. the means tend to zero (bounded sequence in L^1);
//! 5. the exponential integral with exponent `gamma = 2 > q` exceeds the
//!    plateau lower bound `(1/(d n^d)) e^{alpha (ln n)^{gamma/q}}`, which
//!    grows by >= 10x per decade of n — divergence diagnosed by monotone
//!    growth, never by a claimed infinite value.

use crate::error::Result;
use crate::fields::{self, ScalarField};
use crate::functional::{i_delta_exact_1d, NonlocalParams};
use crate::geometry::Domain;
use crate::quad::{integrate_graded, QuadOptions};
use crate::report::VerificationReport;

use super::VerifyOptions;

const INV_E: f64 = 1.0 / std::f64::consts::E;
const Q: f64 = 1.5;
const GAMMA: f64 = 2.0;
const ALPHA: f64 = 1.0;
const N_GRID: [u64; 3] = [1_000, 10_000, 100_000];

/// Exact value of the cross term
/// `J_cross = int_0^{1/n} int_{a_n}^{1/e} (r2 - r1)^{-2} dr2 dr1`
/// (plateau point against far slope points) as a function of `ln n`.
fn cross_term_exact(ln_n: f64) -> f64 {
    let b_n = ln_n.powf(1.0 / q_conj()).exp();
    let inv_n = (-ln_n).exp();
    // ln(a_n / (a_n - 1/n)) - ln((1/e) / (1/e - 1/n)), a_n = b_n / n
    -(1.0 - 1.0 / b_n).ln() + (1.0 - std::f64::consts::E * inv_n).ln()
}

/// Exact value of the far term
/// `J_far = 2 int_{1/n}^{1/(e b_n)} int_{r1 b_n}^{1/e} (r2 - r1)^{-2} dr2 dr1`
/// (slope points a factor `b_n` apart) as a function of `ln n`.
fn far_term_exact(ln_n: f64) -> f64 {
    let b_n = ln_n.powf(1.0 / q_conj()).exp();
    let inv_n = (-ln_n).exp();
    let log_part = (ln_n - 1.0 - b_n.ln()) / (b_n - 1.0);
    let correction =
        ((1.0 - std::f64::consts::E * inv_n) / (1.0 - 1.0 / b_n)).ln();
    2.0 * (log_part - correction)
}

fn q_conj() -> f64 {
    Q / (Q - 1.0)
}

/// Exact mean of the profile over `(0, 1/e)`: plateau mass plus the
/// elementary antiderivative `int ln(1/r) dr = r (1 + ln(1/r))`.
fn mean_exact(ln_n: f64) -> f64 {
    let inv_n = (-ln_n).exp();
    let plateau = ln_n.powf(1.0 / Q) * inv_n;
    let slope = (2.0 * INV_E - (1.0 + ln_n) * inv_n) / ln_n.powf(1.0 / q_conj());
    std::f64::consts::E * (plateau + slope)
}

fn line_functional_exact(ln_n: f64) -> f64 {
    2.0 * cross_term_exact(ln_n) + far_term_exact(ln_n)
}

/// Quadrature oracle for the cross term: integrate the inner antiderivative
/// over the plateau.
fn cross_term_quadrature(n: u64) -> Result<f64> {
    let a_n = ScalarField::<f64>::moser_a_n(n, Q);
    let inv_n = 1.0 / n as f64;
    let f = |r1: f64| 1.0 / (a_n - r1) - 1.0 / (INV_E - r1);
    integrate_graded(&f, 0.0, inv_n, &QuadOptions::with_tol(1e-12))
}

/// Quadrature oracle for the far term.
fn far_term_quadrature(n: u64) -> Result<f64> {
    let b_n = ScalarField::<f64>::moser_b_n(n, Q);
    let inv_n = 1.0 / n as f64;
    let upper = 1.0 / (std::f64::consts::E * b_n);
    let f = |r1: f64| 1.0 / (r1 * (b_n - 1.0)) - 1.0 / (INV_E - r1);
    Ok(2.0 * integrate_graded(&f, inv_n, upper, &QuadOptions::with_tol(1e-12))?)
}

pub fn verify(opt: &VerifyOptions) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("moser");
    report.config_entry("seed", opt.seed);
    report.config_entry("effort", opt.effort);
    report.config_entry("q", Q);
    report.config_entry("gamma", GAMMA);
    report.config_entry("alpha", ALPHA);
    let interval = Domain::interval(0.0, INV_E)?;
    let params = NonlocalParams::new(1, 1.0, 1.0)?;

    let mut means = Vec::new();
    let mut plateau_bounds = Vec::new();
    for &n in &N_GRID {
        let field = ScalarField::moser(n, Q)?;
        let ln_n = (n as f64).ln();

        // (1) decomposition closed form vs independent full evaluator
        let direct = i_delta_exact_1d(&field, &interval, &params, 1e-7)?.value;
        let decomposed = line_functional_exact(ln_n);
        report.push_leq(
            format!("n={n}/decomposition-vs-evaluator"),
            (direct / decomposed - 1.0).abs(),
            1e-4,
        );
        // and each piece against its quadrature oracle
        report.push_leq(
            format!("n={n}/cross-term-closed-form"),
            (cross_term_exact(ln_n) / cross_term_quadrature(n)? - 1.0).abs(),
            1e-9,
        );
        report.push_leq(
            format!("n={n}/far-term-closed-form"),
            (far_term_exact(ln_n) / far_term_quadrature(n)? - 1.0).abs(),
            1e-9,
        );

        // (2) measured pieces below the stated bounds
        let a_n = ScalarField::<f64>::moser_a_n(n, Q);
        let b_n = ScalarField::<f64>::moser_b_n(n, Q);
        report.push_leq(
            format!("n={n}/cross-term-bound"),
            cross_term_exact(ln_n),
            (a_n / (a_n - 1.0 / n as f64)).ln(),
        );
        report.push_leq(
            format!("n={n}/far-term-bound"),
            far_term_exact(ln_n),
            2.0 * (n as f64 / (std::f64::consts::E * b_n)).ln() / (b_n - 1.0),
        );

        // (4) mean of the profile over the interval, against the closed form
        let mean = fields::mean(&field, &interval, 1e-10)?.value;
        report.push_leq(
            format!("n={n}/mean-closed-form"),
            (mean - mean_exact(ln_n)).abs(),
            1e-8,
        );
        means.push(mean);

        // (5) plateau lower bound on the exponential integral
        let mean_ball = fields::mean(&field, &Domain::ball0(INV_E, 1)?, 1e-10)?.value;
        let profile = field.line_profile(0.0, INV_E).unwrap();
        let exp_integral = integrate_graded(
            &|r| (ALPHA * (profile.eval(r) - mean_ball).abs().powf(GAMMA)).exp(),
            0.0,
            INV_E,
            &QuadOptions::with_tol(1e-9),
        )?;
        let plateau = ScalarField::<f64>::moser_plateau(n, Q);
        let shifted_lower = (1.0 / n as f64) * (ALPHA * (plateau - mean_ball).powf(GAMMA)).exp();
        report.push_leq(format!("n={n}/exp-integral-above-plateau"), shifted_lower, exp_integral);
        let stated_lower = (1.0 / n as f64) * (ALPHA * ln_n.powf(GAMMA / Q)).exp();
        plateau_bounds.push(stated_lower);
        report.constant(&format!("exp_integral[n={n}]"), exp_integral);
    }

    // (4) means decrease toward zero; the closed form carries the limit
    // beyond desk scale
    for w in means.windows(2) {
        report.push_leq("means-decreasing", w[1], w[0]);
    }
    report.push_leq("means-vanish", mean_exact(1e6), 0.05 * means[0]);
    report.constant("final_mean", *means.last().unwrap());

    // (5) stated lower bound grows by >= 10x per decade of n
    for w in plateau_bounds.windows(2) {
        report.push_leq("plateau-bound-growth", 10.0 * w[0], w[1]);
    }
    report.constant("final_plateau_bound", *plateau_bounds.last().unwrap());

    // (3) decay of the functional: the closed form (validated above) along a
    // ln-n grid. Record the rising desk-scale side honestly, then assert
    // monotone decay beyond the peak and final value below half the peak.
    // geometric grid: the decay scale is e^{(ln n)^{1/q'}}, so reaching a
    // tenth of the peak needs ln n in the thousands
    let ln_grid: Vec<f64> = (0..=40).map(|k| 15.0 * 1.15f64.powi(k)).collect();
    let vals: Vec<f64> = ln_grid.iter().map(|&t| line_functional_exact(t)).collect();
    let (peak_idx, peak) = vals
        .iter()
        .enumerate()
        .fold((0, f64::MIN), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    report.constant("peak_ln_n", ln_grid[peak_idx]);
    report.constant("peak_value", peak);
    for k in (peak_idx + 1)..vals.len() {
        report.push_leq(format!("decay/ln_n={}", ln_grid[k]), vals[k], vals[k - 1]);
    }
    report.push_leq("decay/final-below-tenth-of-peak", *vals.last().unwrap(), 0.1 * peak);
    report.push_leq(
        "desk-scale-on-rising-side",
        line_functional_exact((N_GRID[0] as f64).ln()),
        line_functional_exact((N_GRID[2] as f64).ln()),
    );

    report.finish_by_margins();
    Ok(report)
}
