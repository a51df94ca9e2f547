//! Verifies the nonlocal Poincare-type inequality on balls:
//!
//! ```text
//! iint_{B x B} |u(x) - u(y)|^p dx dy
//!     <= C_{d,p} ( |B|^{(d+p)/d} I_{delta,p}(u, B) + delta^p |B|^2 ).
//! ```
//!
//! The constant is existential, so the suite measures the ratio lhs/rhs over
//! a seeded family (linear, indicator-at-height-delta, Moser, truncated
//! LogLog) in d in {1, 2} and asserts a uniform finite bound, reporting the
//! maximum. The truncation remark is exercised by driving the cap upward on
//! a fixed field and checking the ratios stay bounded by the same constant.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::fields::ScalarField;
use crate::functional::{i_delta_auto, NonlocalParams};
use crate::geometry::{child_seed, Domain, SamplerConfig, UniformSampler};
use crate::mc::run_batches;
use crate::report::VerificationReport;

use super::VerifyOptions;

const INV_E: f64 = 1.0 / std::f64::consts::E;

/// `iint_{B x B} |u(x) - u(y)|^p` by Monte Carlo pairs.
fn pair_energy(
    field: &ScalarField<f64>,
    domain: &Domain<f64>,
    p: f64,
    seed: u64,
    batch: usize,
) -> (f64, f64) {
    let cfg = SamplerConfig {
        seed,
        batch_size: batch,
        max_batches: 32,
    };
    let dim = domain.dim();
    let stats = run_batches(&cfg, |_, s| {
        let mut sampler = UniformSampler::new(domain, s);
        let mut acc = 0.0;
        for _ in 0..cfg.batch_size {
            let (x, y) = sampler.next_pair();
            acc += (field.eval_nan(&x, dim) - field.eval_nan(&y, dim))
                .abs()
                .powf(p);
        }
        acc / cfg.batch_size as f64
    });
    let vol2 = domain.measure() * domain.measure();
    (stats.mean * vol2, stats.stderr * vol2)
}

struct Trial {
    name: String,
    field: ScalarField<f64>,
    domain: Domain<f64>,
    d: usize,
    p: f64,
    delta: f64,
}

fn make_trial(i: usize, seed: u64) -> Trial {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = if i % 2 == 0 { 1 } else { 2 };
    let p = [1.5, 2.0, 3.0][i % 3];
    match (i / 2) % 4 {
        0 => {
            let g = rng.gen_range(0.2..3.0);
            let delta = rng.gen_range(0.02..0.3);
            let mut gradient = [0.0; 3];
            gradient[0] = g;
            if d == 2 {
                gradient[1] = rng.gen_range(-1.0..1.0);
            }
            let domain = if d == 1 {
                Domain::interval(-1.0, 1.0).unwrap()
            } else {
                Domain::ball0(1.0, 2).unwrap()
            };
            Trial {
                name: format!("linear[{i}]/d={d}/p={p}"),
                field: ScalarField::linear(gradient, 0.0),
                domain,
                d,
                p,
                delta,
            }
        }
        1 => {
            // indicator at height exactly delta: I = 0, second rhs term rules
            let delta = rng.gen_range(0.05..0.5);
            let r = rng.gen_range(0.2..0.7);
            let domain = if d == 1 {
                Domain::interval(-1.0, 1.0).unwrap()
            } else {
                Domain::ball0(1.0, 2).unwrap()
            };
            Trial {
                name: format!("indicator[{i}]/d={d}/p={p}"),
                field: ScalarField::indicator(Domain::ball0(r, d).unwrap(), delta),
                domain,
                d,
                p,
                delta,
            }
        }
        2 => {
            let n = *[50u64, 1000, 100_000].iter().nth(i % 3).unwrap();
            let q = rng.gen_range(1.2..2.5);
            Trial {
                name: format!("moser[{i}]/d={d}/p={p}/n={n}"),
                field: ScalarField::moser(n, q).unwrap(),
                domain: if d == 1 {
                    Domain::interval(-INV_E, INV_E).unwrap()
                } else {
                    Domain::ball0(INV_E, 2).unwrap()
                },
                d,
                p,
                delta: 1.0,
            }
        }
        _ => {
            let cap = rng.gen_range(1.0..4.0);
            Trial {
                name: format!("loglog-trunc[{i}]/d={d}/p={p}"),
                field: ScalarField::truncated(ScalarField::loglog(3.0).unwrap(), cap).unwrap(),
                domain: if d == 1 {
                    Domain::interval(-INV_E, INV_E).unwrap()
                } else {
                    Domain::ball0(INV_E, 2).unwrap()
                },
                d,
                p,
                delta: 1.0,
            }
        }
    }
}

/// Ratio of the probe at the given sample budget, its standard error, and
/// the same ratio re-estimated with a doubled Monte Carlo budget (against
/// the same functional value, so the comparison isolates sampling noise).
fn ratio_for(
    trial: &Trial,
    opt: &VerifyOptions,
    batch: usize,
    seed: u64,
) -> Result<(f64, f64, f64)> {
    let params = NonlocalParams::new(trial.d, trial.p, trial.delta)?;
    let cfg = SamplerConfig {
        seed,
        batch_size: batch,
        max_batches: 64,
    };
    // loose tolerance first (ratios are compared against a cap of 100, and
    // the steepest profile/exponent combinations only stabilize at the
    // permille level), retrying tighter for profiles whose refinement ladder
    // crosses the acceptance band slowly
    let i_est = i_delta_auto(&trial.field, &trial.domain, &params, 1e-3, &cfg)
        .or_else(|_| i_delta_auto(&trial.field, &trial.domain, &params, 1e-4, &cfg))?;
    let (lhs, lhs_err) = pair_energy(&trial.field, &trial.domain, trial.p, seed ^ 0x1a5, batch);
    let (lhs_2x, _) =
        pair_energy(&trial.field, &trial.domain, trial.p, seed ^ 0x2b6, 2 * batch);
    let vol = trial.domain.measure();
    let rhs = vol.powf((trial.d as f64 + trial.p) / trial.d as f64) * i_est.value
        + trial.delta.powf(trial.p) * vol * vol;
    let _ = opt;
    Ok((lhs / rhs, lhs_err / rhs, lhs_2x / rhs))
}

pub fn verify(opt: &VerifyOptions) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("poincare");
    report.config_entry("seed", opt.seed);
    report.config_entry("effort", opt.effort);
    let n_trials = ((100.0 * opt.effort) as usize).max(8);
    report.config_entry("trials", n_trials);
    let batch = ((8_000.0 * opt.effort) as usize).max(1000);
    const RATIO_CAP: f64 = 100.0;

    let rows: Vec<(String, f64, f64, f64)> = (0..n_trials)
        .into_par_iter()
        .map(|i| {
            let trial = make_trial(i, child_seed(opt.seed, i as u64));
            let (ratio, sigma, ratio_2x) =
                ratio_for(&trial, opt, batch, opt.seed ^ ((i as u64) << 32))?;
            Ok((trial.name, ratio, sigma, ratio_2x))
        })
        .collect::<Result<_>>()?;

    let mut max_ratio = 0.0f64;
    let mut max_ratio_2x = 0.0f64;
    for (name, ratio, sigma, ratio_2x) in rows {
        max_ratio = max_ratio.max(ratio);
        max_ratio_2x = max_ratio_2x.max(ratio_2x);
        report.push_row(name, ratio + 3.0 * sigma, RATIO_CAP, RATIO_CAP - ratio - 3.0 * sigma);
    }
    // the reported maximum is a stable estimate: doubling the sample budget
    // moves it by less than 10%
    report.push_leq(
        "doubled-samples-stability",
        (max_ratio_2x / max_ratio - 1.0).abs(),
        0.10,
    );

    // truncation cap sweep on the LogLog field: same uniform constant
    for (j, &cap) in [1.0f64, 2.0, 4.0, 8.0].iter().enumerate() {
        let trial = Trial {
            name: format!("loglog-cap-sweep/cap={cap}"),
            field: ScalarField::truncated(ScalarField::loglog(3.0).unwrap(), cap).unwrap(),
            domain: Domain::interval(-INV_E, INV_E).unwrap(),
            d: 1,
            p: 2.0,
            delta: 1.0,
        };
        let (ratio, sigma, _) =
            ratio_for(&trial, opt, batch, opt.seed ^ 0xca9 ^ ((j as u64) << 8))?;
        max_ratio = max_ratio.max(ratio);
        report.push_row(trial.name, ratio + 3.0 * sigma, RATIO_CAP, RATIO_CAP - ratio - 3.0 * sigma);
    }

    report.constant("empirical_C", max_ratio);
    report.finish_by_margins();
    Ok(report)
}
