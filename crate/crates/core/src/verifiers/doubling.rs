//! Verifies the level-doubling inequality for the raw level integral
//! `J_delta = delta^{-p} I_{delta,p}`:
//!
//! ```text
//! J_{2^k delta} <= 2^{-k(p-1)} J_delta,   k = 1, 2, 3,   p > 1.
//! ```
//!
//! Brute-force property run: seeded random piecewise-linear fields on (0,1)
//! evaluated deterministically, plus random radial fields on the unit disk
//! evaluated by correlated Monte Carlo (one sample stream for every level, so
//! the ratio noise largely cancels); Monte Carlo rows get 3-sigma slack.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::fields::{Grid, Interp, ScalarField};
use crate::functional::{doubling_mc, i_delta_exact_1d, NonlocalParams};
use crate::geometry::{child_seed, Domain, SamplerConfig};
use crate::levelset::Profile;
use crate::report::VerificationReport;

use super::VerifyOptions;

const PS: [f64; 3] = [1.5, 2.0, 3.0];

/// Random piecewise-linear field on (0,1) with 3..=9 nodes in [0,1].
fn random_line_field(seed: u64) -> ScalarField<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(3usize..=9);
    let values: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
    ScalarField::Grid(
        Grid::new(
            1,
            [n, 1, 1],
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            values,
            Interp::Linear,
        )
        .unwrap(),
    )
}

/// Random radial piecewise-linear profile on [0, 1].
fn random_radial_field(seed: u64) -> ScalarField<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(3usize..=7);
    let mut knots: Vec<f64> = (0..n - 2).map(|_| rng.gen_range(0.05..0.95)).collect();
    knots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    knots.dedup();
    let mut xs = vec![0.0];
    xs.extend_from_slice(&knots);
    xs.push(1.0);
    let vals: Vec<f64> = (0..xs.len()).map(|_| rng.gen_range(0.0..1.0)).collect();
    let breaks = knots.clone();
    let f = move |r: f64| {
        let r = r.clamp(0.0, 1.0);
        let j = xs.partition_point(|&x| x <= r).min(xs.len() - 1).max(1);
        let t = (r - xs[j - 1]) / (xs[j] - xs[j - 1]);
        vals[j - 1] + t * (vals[j] - vals[j - 1])
    };
    ScalarField::Radial(Profile::new(Arc::new(f), 0.0, 1.0, breaks))
}

fn oscillation(field: &ScalarField<f64>, domain: &Domain<f64>) -> f64 {
    let profile = match domain {
        Domain::Interval { a, b } => field.line_profile(*a, *b),
        Domain::Ball { radius, .. } => field.radial_profile(*radius),
        _ => None,
    }
    .expect("generator emits profiled fields");
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for k in profile.knots() {
        let v = profile.eval(k);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    hi - lo
}

struct Row {
    point: String,
    lhs: f64,
    rhs: f64,
    margin: f64,
}

fn line_trial(opt: &VerifyOptions, i: usize) -> Result<Row> {
    let field = random_line_field(child_seed(opt.seed, i as u64));
    let domain = Domain::interval(0.0, 1.0)?;
    let p = PS[i % PS.len()];
    let osc = oscillation(&field, &domain);
    let delta = osc / 12.0;
    let mut j = Vec::new();
    for k in 0..=3 {
        let params = NonlocalParams::new(1, p, delta * 2f64.powi(k))?;
        let est = i_delta_exact_1d(&field, &domain, &params, 1e-3)?;
        j.push(est.value / params.delta.powf(p));
    }
    // worst of k = 1..3, small deterministic slack for quadrature error
    let mut worst = Row {
        point: format!("line[{i}]/p={p}"),
        lhs: 0.0,
        rhs: 0.0,
        margin: f64::INFINITY,
    };
    for k in 1..=3usize {
        let bound = 2f64.powf(-(k as f64) * (p - 1.0)) * j[0];
        // slack covers the quadrature tolerance; the lemma's margins are
        // orders of magnitude wider in practice
        let slack = 5e-3 * j[0].abs() + 1e-12;
        let margin = bound + slack - j[k];
        if margin < worst.margin {
            worst = Row {
                point: format!("line[{i}]/p={p}/k={k}"),
                lhs: j[k],
                rhs: bound,
                margin,
            };
        }
    }
    Ok(worst)
}

fn radial_trial(opt: &VerifyOptions, i: usize) -> Result<Row> {
    let field = random_radial_field(child_seed(opt.seed ^ 0xd15c, i as u64));
    let domain = Domain::ball0(1.0, 2)?;
    let p = PS[i % PS.len()];
    let osc = oscillation(&field, &domain);
    let delta = osc / 12.0;
    let params = NonlocalParams::new(2, p, delta)?;
    let cfg = SamplerConfig {
        seed: opt.seed ^ 0x2d ^ ((i as u64) << 24),
        batch_size: ((4096.0 * opt.effort) as usize).max(512),
        max_batches: 64,
    };
    let ests = doubling_mc(&field, &domain, &params, 3, &cfg)?;
    let mut worst = Row {
        point: format!("radial[{i}]/p={p}"),
        lhs: 0.0,
        rhs: 0.0,
        margin: f64::INFINITY,
    };
    for k in 1..=3usize {
        let bound = 2f64.powf(-(k as f64) * (p - 1.0)) * ests[0].value;
        let sigma = (ests[k].stderr.powi(2)
            + (2f64.powf(-(k as f64) * (p - 1.0)) * ests[0].stderr).powi(2))
        .sqrt();
        let margin = bound + 3.0 * sigma - ests[k].value;
        if margin < worst.margin {
            worst = Row {
                point: format!("radial[{i}]/p={p}/k={k}"),
                lhs: ests[k].value,
                rhs: bound,
                margin,
            };
        }
    }
    Ok(worst)
}

pub fn verify(opt: &VerifyOptions) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("doubling");
    report.config_entry("seed", opt.seed);
    report.config_entry("effort", opt.effort);
    let n_line = ((200.0 * opt.effort) as usize).max(10);
    let n_radial = ((50.0 * opt.effort) as usize).max(5);
    report.config_entry("line_trials", n_line);
    report.config_entry("radial_trials", n_radial);

    let line_rows: Vec<Row> = (0..n_line)
        .into_par_iter()
        .map(|i| line_trial(opt, i))
        .collect::<Result<_>>()?;
    let radial_rows: Vec<Row> = (0..n_radial)
        .into_par_iter()
        .map(|i| radial_trial(opt, i))
        .collect::<Result<_>>()?;

    let mut worst_ratio = 0.0f64;
    for row in line_rows.into_iter().chain(radial_rows) {
        if row.rhs > 0.0 {
            worst_ratio = worst_ratio.max(row.lhs / row.rhs);
        }
        report.push_row(row.point, row.lhs, row.rhs, row.margin);
    }
    report.constant("max_lhs_over_bound", worst_ratio);
    report.finish_by_margins();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Status;

    #[test]
    fn doubling_suite_holds() {
        let opt = VerifyOptions {
            effort: 0.2,
            ..VerifyOptions::default()
        };
        let report = verify(&opt).unwrap();
        assert_eq!(report.status, Status::Holds, "worst {}", report.worst_margin());
        assert!(report.measured_constants["max_lhs_over_bound"] <= 1.0 + 1e-6);
    }

    #[test]
    fn linear_field_ratio_matches_closed_form() {
        // I = (1 - delta)^2 gives J_{2 delta} / J_delta = 16/81 at delta = 0.1
        let field = ScalarField::linear_1d(1.0f64, 0.0);
        let domain = Domain::interval(0.0, 1.0).unwrap();
        let mut j = Vec::new();
        for &delta in &[0.1, 0.2] {
            let params = NonlocalParams::new(1, 2.0, delta).unwrap();
            let est = i_delta_exact_1d(&field, &domain, &params, 1e-8).unwrap();
            j.push(est.value / delta / delta);
        }
        let ratio = j[1] / j[0];
        assert!((ratio - 16.0 / 81.0).abs() < 1e-6, "ratio {ratio}");
    }
}
