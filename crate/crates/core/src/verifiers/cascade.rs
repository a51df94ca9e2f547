//! Verifies the superlevel-set cascade machinery on the unit ball for
//! `p >= d` and `delta = 1` (fields are mean-centered, so `u_B = 0` after the
//! shift):
//!
//! 1. reflection comparability: `|{x in B_{3/2} : |u~| >= t}| <= C |{x in
//!    B_1 : |u| >= t}|` for the radial reflection extension `u~`;
//! 2. extension energy bound: `I_1(u~, B_{3/2}) <= C I_1(u, B_1)`;
//! 3. one-step inequality: `m(k) <= c2 I_l(u, B_1) m(k-1)^{p/d}` for the
//!    superlevel measures `m(k) = |{x in B_1 : |u - u_B| > k l0}|`;
//! 4. iterated cascade: `m(k) <= e^{-alpha (p/d)^{k+2}} m(1)` for k = 2..L,
//!    at the smallest level unit `l0` in a sweep for which the premises hold;
//! 5. the one-step -> iterated implication as a pure arithmetic property of
//!    the measured sequence (and of worst-case synthetic sequences, in the
//!    unit tests).
//!
//! All constants (`C`, `c2`, `l0`) are measured and reported, never assumed.

use crate::error::Result;
use crate::fields::{self, reflect_extend, ScalarField};
use crate::functional::{i_delta_radial, NonlocalParams};
use crate::geometry::{Domain, SamplerConfig};
use crate::report::VerificationReport;

use super::VerifyOptions;

const LAMBDA_MAX: usize = 6;
const QUAD_TOL: f64 = 1e-6;
const EQV_CAP: f64 = 10.0;
const EXTN_CAP: f64 = 100.0;
const INV_E: f64 = 1.0 / std::f64::consts::E;

struct Case {
    name: String,
    field: ScalarField<f64>,
    d: usize,
    p: f64,
}

fn cases() -> Vec<Case> {
    vec![
        Case {
            // oscillation 1/2 < l0: every superlevel is empty
            name: "bounded-indicator".into(),
            field: ScalarField::indicator(Domain::ball0(0.5, 1).unwrap(), 0.5),
            d: 1,
            p: 2.0,
        },
        Case {
            name: "loglog-scaled/tau=e^-1".into(),
            field: ScalarField::scaled(ScalarField::loglog(3.0).unwrap(), INV_E).unwrap(),
            d: 1,
            p: 2.0,
        },
        Case {
            name: "moser-scaled/n=100000".into(),
            field: ScalarField::scaled(ScalarField::moser(100_000, 1.5).unwrap(), INV_E)
                .unwrap(),
            d: 1,
            p: 1.0,
        },
    ]
}

struct CaseData {
    name: String,
    s: f64,
    alpha: f64,
    ell0: f64,
    m: Vec<f64>,
    i_one: f64,
    i_ell0: f64,
    budget: f64,
    c2: Option<f64>,
}

/// `|{x in B_1 : |u - center| > t}|`, exact via profile inversion.
fn level_measure(
    field: &ScalarField<f64>,
    domain: &Domain<f64>,
    center: f64,
    t: f64,
) -> Result<f64> {
    Ok(fields::superlevel_measure_centered(
        field,
        domain,
        center,
        t,
        &SamplerConfig::default(),
    )?
    .value)
}

/// Worst sequence allowed by the one-step bound, in log space:
/// `ln m(k) <= ln K (s^{k-1} - 1)/(s - 1) + s^{k-1} ln m(1)` (geometric sum
/// collapses to `(k-1) ln K + ln m(1)` at s = 1).
fn envelope_log(m1_log: f64, k_log: f64, s: f64, lambda: usize) -> f64 {
    let e = (lambda - 1) as f64;
    if s == 1.0 {
        e * k_log + m1_log
    } else {
        k_log * (s.powf(e) - 1.0) / (s - 1.0) + s.powf(e) * m1_log
    }
}

/// Arithmetic core of the iteration: if `m(k) <= K m(k-1)^s` for k >= 2 with
/// `K <= e^{-alpha s^3}` and (for s > 1) `m(1) <= e^{-alpha s^3}`, then
/// `m(k) <= e^{-alpha s^{k+2}} m(1)` for k = 2..lambda_max. Returns the worst
/// signed log-margin (>= 0 means the implication closes).
fn implication_margin(m1_log: f64, k_log: f64, s: f64, alpha: f64, lambda_max: usize) -> f64 {
    let mut worst = f64::INFINITY;
    for lambda in 2..=lambda_max {
        let bound_log = -alpha * s.powf((lambda + 2) as f64) + m1_log;
        worst = worst.min(bound_log - envelope_log(m1_log, k_log, s, lambda));
    }
    worst
}

fn analyze(case: &Case, alpha: f64) -> Result<CaseData> {
    let domain = Domain::ball0(1.0, case.d)?;
    let s = case.p / case.d as f64;
    let center = fields::mean(&case.field, &domain, 1e-9)?.value;
    let i_one = i_delta_radial(
        &case.field,
        &domain,
        &NonlocalParams::new(case.d, case.p, 1.0)?,
        QUAD_TOL,
    )?
    .value;
    let budget = domain.measure().powf((case.p - case.d as f64) / case.d as f64) * i_one;

    let mut chosen: Option<(f64, Vec<f64>)> = None;
    for ell0 in 1..=8 {
        let ell0 = ell0 as f64;
        let m: Vec<f64> = (1..=LAMBDA_MAX)
            .map(|k| level_measure(&case.field, &domain, center, k as f64 * ell0))
            .collect::<Result<_>>()?;
        let premise_ok = s <= 1.0 || m[0] <= (-alpha * s.powi(3)).exp();
        let cascade_ok = (2..=LAMBDA_MAX)
            .all(|k| m[k - 1] <= (-alpha * s.powf((k + 2) as f64)).exp() * m[0] + 1e-300);
        if premise_ok && cascade_ok {
            chosen = Some((ell0, m));
            break;
        }
    }
    let (ell0, m) = chosen.ok_or_else(|| {
        crate::error::Error::InvalidParams(format!(
            "no level unit in 1..=8 satisfies the cascade premises for {}",
            case.name
        ))
    })?;

    let i_ell0 = i_delta_radial(
        &case.field,
        &domain,
        &NonlocalParams::new(case.d, case.p, ell0)?,
        QUAD_TOL,
    )?
    .value;
    // measured one-step constant: max over levels with nonzero predecessor
    let mut c2: Option<f64> = None;
    if i_ell0 > 0.0 {
        for k in 2..=LAMBDA_MAX {
            if m[k - 2] > 0.0 {
                let cand = m[k - 1] / (i_ell0 * m[k - 2].powf(s));
                c2 = Some(c2.map_or(cand, |c: f64| c.max(cand)));
            }
        }
    }
    Ok(CaseData {
        name: case.name.clone(),
        s,
        alpha,
        ell0,
        m,
        i_one,
        i_ell0,
        budget,
        c2,
    })
}

pub fn verify(opt: &VerifyOptions) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("cascade");
    report.config_entry("seed", opt.seed);
    report.config_entry("effort", opt.effort);
    report.config_entry("lambda_max", LAMBDA_MAX);
    let alpha = 1.0;
    report.config_entry("alpha", alpha);

    let all = cases();
    let mut data = Vec::new();
    for case in &all {
        data.push(analyze(case, alpha)?);
    }

    let c2_uniform = data
        .iter()
        .filter_map(|c| c.c2)
        .fold(0.0f64, f64::max);

    for c in &data {
        // premise on m(1) for supercritical s
        if c.s > 1.0 {
            report.push_leq(
                format!("{}/m1-premise", c.name),
                c.m[0],
                (-c.alpha * c.s.powi(3)).exp(),
            );
        }
        // iterated cascade at the chosen level unit
        for k in 2..=LAMBDA_MAX {
            report.push_leq(
                format!("{}/cascade/k={k}", c.name),
                c.m[k - 1],
                (-c.alpha * c.s.powf((k + 2) as f64)).exp() * c.m[0] + 1e-300,
            );
        }
        // one-step inequality with the single family-wide constant
        if c.i_ell0 > 0.0 && c2_uniform > 0.0 {
            for k in 2..=LAMBDA_MAX {
                if c.m[k - 2] > 0.0 {
                    report.push_leq(
                        format!("{}/one-step/k={k}", c.name),
                        c.m[k - 1],
                        c2_uniform * (1.0 + 1e-9) * c.i_ell0 * c.m[k - 2].powf(c.s),
                    );
                }
            }
            // the smallness condition that lets the iteration close
            if let Some(c2) = c.c2 {
                report.push_leq(
                    format!("{}/one-step-smallness", c.name),
                    c2 * c.i_ell0,
                    (-c.alpha * c.s.powi(3)).exp(),
                );
            }
        }
        // implication applied to the measured sequence (log-space margins)
        if let Some(c2) = c.c2 {
            let k_log = (c2 * c.i_ell0).ln();
            if c.m[0] > 0.0 && k_log <= -c.alpha * c.s.powi(3) {
                let margin = implication_margin(c.m[0].ln(), k_log, c.s, c.alpha, LAMBDA_MAX);
                report.push_row(
                    format!("{}/one-step-implies-cascade", c.name),
                    -margin,
                    0.0,
                    margin,
                );
            }
        }
        report.constant(&format!("ell0[{}]", c.name), c.ell0);
        report.constant(&format!("budget[{}]", c.name), c.budget);
        report.constant(&format!("I_1[{}]", c.name), c.i_one);
    }
    report.constant("c2", c2_uniform);

    // reflection comparability and extension energy bound
    for case in &all {
        let d = case.d;
        let ball1 = Domain::ball0(1.0, d)?;
        let ball32 = Domain::ball0(1.5, d)?;
        let center = fields::mean(&case.field, &ball1, 1e-9)?.value;
        let tilde = reflect_extend(case.field.clone());
        let mut eqv_c = 0.0f64;
        for t_mult in 1..=3 {
            let t = t_mult as f64;
            let num = level_measure(&tilde, &ball32, center, t)?;
            let den = level_measure(&case.field, &ball1, center, t)?;
            if den > 0.0 {
                let ratio = num / den;
                eqv_c = eqv_c.max(ratio);
                report.push_leq(format!("{}/eqv/t={t}", case.name), ratio, EQV_CAP);
            } else {
                // empty in B_1 forces empty in the reflection
                report.push_leq(format!("{}/eqv/t={t}", case.name), num, 1e-300);
            }
        }
        let params = NonlocalParams::new(d, case.p, 1.0)?;
        let i_u = i_delta_radial(&case.field, &ball1, &params, QUAD_TOL)?.value;
        let i_tilde = i_delta_radial(&tilde, &ball32, &params, QUAD_TOL)?.value;
        if i_u > 0.0 {
            report.push_leq(format!("{}/extension-energy", case.name), i_tilde / i_u, EXTN_CAP);
            report.constant(&format!("extn_C[{}]", case.name), i_tilde / i_u);
        } else {
            report.push_leq(format!("{}/extension-energy", case.name), i_tilde, 1e-300);
        }
        if eqv_c > 0.0 {
            report.constant(&format!("eqv_C[{}]", case.name), eqv_c);
        }
    }

    // the normalized budget decreases monotonically under downward scaling
    let mut budgets = Vec::new();
    for k in 1..=3 {
        let tau = (-(k as f64)).exp();
        let field = ScalarField::scaled(ScalarField::loglog(3.0)?, tau)?;
        let domain = Domain::ball0(1.0, 1)?;
        let i = i_delta_radial(&field, &domain, &NonlocalParams::new(1, 2.0, 1.0)?, QUAD_TOL)?
            .value;
        budgets.push(domain.measure() * i);
    }
    for w in budgets.windows(2) {
        report.push_leq("budget-monotone-under-scaling", w[1], w[0]);
    }

    report.finish_by_margins();
    Ok(report)
}
