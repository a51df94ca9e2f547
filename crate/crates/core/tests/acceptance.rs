//! Acceptance suite: one test per acceptance criterion, each printing a
//! single `criterion NN <name>: pass|fail` line (visible with
//! `--nocapture`) and enforcing its runtime budget.

use std::time::Instant;

use nonloc_core::fields::ScalarField;
use nonloc_core::functional::{
    i_delta_auto, i_delta_exact_1d, i_delta_mc, sphere_constant_closed_form,
    sphere_constant_quadrature, NonlocalParams,
};
use nonloc_core::levelset::Profile;
use nonloc_core::quad::extrapolate_to_zero;
use nonloc_core::report::Status;
use nonloc_core::verifiers::{self, VerifyOptions};
use nonloc_core::{Domain, DomainF, FieldF, SamplerConfig};

type CheckResult = Result<String, String>;

fn criterion(num: u32, name: &str, budget_secs: f64, body: impl FnOnce() -> CheckResult) {
    let start = Instant::now();
    let outcome = body();
    let elapsed = start.elapsed().as_secs_f64();
    match outcome {
        Ok(detail) => {
            println!("criterion {num:02} {name}: pass ({detail}; {elapsed:.1}s)");
            assert!(
                elapsed < budget_secs,
                "criterion {num} exceeded its {budget_secs}s budget: {elapsed:.1}s"
            );
        }
        Err(msg) => {
            println!("criterion {num:02} {name}: fail ({msg}; {elapsed:.1}s)");
            panic!("criterion {num} {name} failed: {msg}");
        }
    }
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn suite_holds(id: &str) -> Result<nonloc_core::report::VerificationReport, String> {
    let report = verifiers::run(id, &VerifyOptions::default())
        .map_err(|e| format!("suite '{id}' errored: {e}"))?;
    check(report.status == Status::Holds, || {
        format!("suite '{id}' status = {}", report.status.as_str())
    })?;
    Ok(report)
}

fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn unit(state: &mut u64) -> f64 {
    (splitmix(state) >> 11) as f64 / (1u64 << 53) as f64
}

#[test]
fn criterion_01_sphere_constant() {
    criterion(1, "sphere-constant", 1.0, || {
        let mut worst = 0.0f64;
        for d in 1..=3usize {
            for &p in &[1.0, 2.0, 3.0, 4.5] {
                let cf = sphere_constant_closed_form::<f64>(d, p);
                let quad = sphere_constant_quadrature::<f64>(d, p)
                    .map_err(|e| format!("quadrature d={d} p={p}: {e}"))?;
                let rel = (quad / cf - 1.0).abs();
                worst = worst.max(rel);
                check(rel < 1e-8, || format!("d={d} p={p}: rel err {rel:.2e}"))?;
            }
        }
        let spots = [
            (1usize, 2.0f64, 2.0f64),
            (2, 2.0, std::f64::consts::PI),
            (3, 2.0, 4.0 * std::f64::consts::PI / 3.0),
        ];
        for (d, p, want) in spots {
            let got = sphere_constant_closed_form::<f64>(d, p);
            check((got - want).abs() < 1e-12, || {
                format!("spot d={d} p={p}: {got} vs {want}")
            })?;
        }
        // K_{1,p} = 2 for every p
        for &p in &[1.0, 1.5, 2.0, 3.0, 4.5] {
            let got = sphere_constant_closed_form::<f64>(1, p);
            check((got - 2.0).abs() < 1e-12, || format!("K(1,{p}) = {got}"))?;
        }
        Ok(format!("12 grid points, worst rel err {worst:.1e}"))
    });
}

#[test]
fn criterion_02_exact_1d_oracle_and_small_delta_limit() {
    criterion(2, "exact-1d-oracle", 10.0, || {
        let field = ScalarField::linear_1d(1.0, 0.0);
        let domain = Domain::interval(0.0, 1.0).unwrap();
        let cfg = SamplerConfig {
            seed: 0x0acc_0002,
            batch_size: 4096,
            max_batches: 256, // > 10^6 pairs
        };
        for &delta in &[0.5f64, 0.2, 0.1, 0.05] {
            let params = NonlocalParams::new(1, 2.0, delta).unwrap();
            let target = (1.0 - delta).powi(2);
            let det = i_delta_exact_1d(&field, &domain, &params, 1e-8)
                .map_err(|e| format!("exact1d delta={delta}: {e}"))?;
            check((det.value - target).abs() < 1e-6, || {
                format!("delta={delta}: exact1d {} vs {target}", det.value)
            })?;
            let mc = i_delta_mc(&field, &domain, &params, &cfg)
                .map_err(|e| format!("mc delta={delta}: {e}"))?;
            check((mc.value - target).abs() <= 3.0 * mc.stderr, || {
                format!(
                    "delta={delta}: mc {} +- {} vs {target}",
                    mc.value, mc.stderr
                )
            })?;
        }
        // delta -> 0 extrapolation recovers (1/p) K_{1,2} int |u'|^2 = 1
        let deltas = [0.2, 0.1, 0.05, 0.025];
        let values: Vec<f64> = deltas
            .iter()
            .map(|&delta| {
                let params = NonlocalParams::new(1, 2.0, delta).unwrap();
                i_delta_exact_1d(&field, &domain, &params, 1e-8)
                    .map(|e| e.value)
                    .map_err(|e| format!("exact1d delta={delta}: {e}"))
            })
            .collect::<Result<_, _>>()?;
        let limit = extrapolate_to_zero(&deltas, &values);
        check((limit - 1.0).abs() < 1e-3, || {
            format!("extrapolated limit {limit} vs 1")
        })?;
        Ok(format!("4 levels exact + mc, limit {limit:.6}"))
    });
}

#[test]
fn criterion_03_indicator_null_case() {
    criterion(3, "indicator-null", 5.0, || {
        let mut state = 0x0acc_0003u64;
        let cfg = SamplerConfig {
            seed: 0x0acc_0013,
            batch_size: 1024,
            max_batches: 4,
        };
        for i in 0..20usize {
            // alternate between sub-balls of (0,1) and of B_1 in the plane
            let d = 1 + i % 2;
            let (region, omega): (DomainF, DomainF) = if d == 1 {
                let c = 0.2 + 0.6 * unit(&mut state);
                let r = 0.05 + unit(&mut state) * (c.min(1.0 - c) - 0.05).max(0.01);
                (
                    Domain::ball([c, 0.0, 0.0], r, 1).unwrap(),
                    Domain::interval(0.0, 1.0).unwrap(),
                )
            } else {
                let a = 2.0 * std::f64::consts::PI * unit(&mut state);
                let rho = 0.5 * unit(&mut state);
                let r = 0.05 + unit(&mut state) * (1.0 - rho - 0.05).max(0.01);
                (
                    Domain::ball([rho * a.cos(), rho * a.sin(), 0.0], r, 2).unwrap(),
                    Domain::ball0(1.0, 2).unwrap(),
                )
            };
            for &p in &[1.0, 2.0, 3.0] {
                let delta = 0.1 + 0.5 * unit(&mut state);
                let field = ScalarField::indicator(region.clone(), delta);
                let params = NonlocalParams::new(d, p, delta).unwrap();
                let est = i_delta_mc(&field, &omega, &params, &cfg)
                    .map_err(|e| format!("ball {i} p={p}: {e}"))?;
                check(est.value == 0.0, || {
                    format!("ball {i} p={p}: value {} != 0", est.value)
                })?;
            }
        }
        Ok("20 sub-balls x p in {1,2,3}, all exactly zero".to_string())
    });
}

#[test]
fn criterion_04_doubling_suite() {
    criterion(4, "doubling", 120.0, || {
        let report = suite_holds("doubling")?;
        let line: usize = report.config["line_trials"].parse().unwrap();
        let radial: usize = report.config["radial_trials"].parse().unwrap();
        check(line >= 200 && radial >= 50, || {
            format!("trial counts {line}/{radial} below 200/50")
        })?;
        check(report.worst_margin() >= 0.0, || {
            format!("worst margin {}", report.worst_margin())
        })?;
        Ok(format!(
            "{line} line + {radial} radial trials, zero violations, worst margin {:.3e}",
            report.worst_margin()
        ))
    });
}

#[test]
fn criterion_05_scaling_law() {
    criterion(5, "scaling-law", 60.0, || {
        let report = suite_holds("loglog")?;
        for tau in [0.5, 0.25, 0.125] {
            let key = format!("scaling-identity/tau={tau}");
            let row = report
                .evidence
                .iter()
                .find(|r| r.point == key)
                .ok_or_else(|| format!("missing row {key}"))?;
            // row checks |ratio - 1| <= 0.05
            check(row.lhs <= 0.05 && row.margin >= 0.0, || {
                format!("{key}: |ratio-1| = {}", row.lhs)
            })?;
        }
        let decay: Vec<_> = report
            .evidence
            .iter()
            .filter(|r| r.point.starts_with("scaling-decay/tau="))
            .collect();
        check(decay.len() >= 2 && decay.iter().all(|r| r.margin >= 0.0), || {
            "scaled values not monotonically decreasing".to_string()
        })?;
        Ok("ratio = 1 +- 0.05 at tau in {0.5,0.25,0.125}, monotone decay".to_string())
    });
}

#[test]
fn criterion_06_supercritical_counterexample() {
    criterion(6, "supercritical-counterexample", 60.0, || {
        let report = suite_holds("loglog")?;
        let t_final = report.measured_constants["t_final"];
        check(t_final > 1e6, || format!("T(2^-40) = {t_final:.3e} <= 1e6"))?;
        let growth: Vec<_> = report
            .evidence
            .iter()
            .filter(|r| r.point.starts_with("divergence/growth-factor/"))
            .collect();
        check(growth.len() == 5 && growth.iter().all(|r| r.margin >= 0.0), || {
            "growth factor 1.1 not sustained on the last 5 grid points".to_string()
        })?;
        let stable = report
            .evidence
            .iter()
            .filter(|r| r.point == "finite-value/refinement-stability")
            .all(|r| r.lhs < 0.01 && r.margin >= 0.0);
        check(stable, || "refinement instability above 1%".to_string())?;
        Ok(format!("T crosses 1e6 (final {t_final:.2e}), growth > 1.1 sustained"))
    });
}

#[test]
fn criterion_07_critical_counterexample() {
    criterion(7, "critical-counterexample", 120.0, || {
        let report = suite_holds("moser")?;
        // The functional of the plateau-log family is evaluated in closed
        // form (cross-checked against quadrature and the generic evaluator
        // at n in {1e3,1e4,1e5}); its decay to zero is asserted beyond the
        // peak of the closed form, which sits near ln n = 27 — at desk-scale
        // n the sequence is still rising, and the report records that.
        let peak = report.measured_constants["peak_ln_n"];
        check((15.0..40.0).contains(&peak), || format!("peak at ln n = {peak}"))?;
        let final_below = report
            .evidence
            .iter()
            .find(|r| r.point == "decay/final-below-tenth-of-peak")
            .ok_or("missing final-decay row")?;
        check(final_below.margin >= 0.0, || {
            format!("final value {} above a tenth of the peak", final_below.lhs)
        })?;
        for n in [1_000u64, 10_000, 100_000] {
            let row_ok = |name: &str| {
                report
                    .evidence
                    .iter()
                    .find(|r| r.point == format!("n={n}/{name}"))
                    .is_some_and(|r| r.margin >= 0.0)
            };
            check(row_ok("cross-term-bound"), || format!("cross-term bound fails at n={n}"))?;
            check(row_ok("decomposition-vs-evaluator"), || {
                format!("closed form disagrees with the evaluator at n={n}")
            })?;
        }
        let growth_ok = report
            .evidence
            .iter()
            .filter(|r| r.point == "plateau-bound-growth")
            .all(|r| r.margin >= 0.0);
        check(growth_ok, || "plateau bound grows < 10x per decade".to_string())?;
        let final_mean = report.measured_constants["final_mean"];
        let vanish = report
            .evidence
            .iter()
            .find(|r| r.point == "means-vanish")
            .ok_or("missing means-vanish row")?;
        check(vanish.margin >= 0.0, || {
            format!("mean does not vanish: {} vs {}", vanish.lhs, vanish.rhs)
        })?;
        Ok(format!(
            "decay beyond peak (ln n = {peak:.0}), plateau bound 10x/decade, mean -> 0 \
             (last desk value {final_mean:.3})"
        ))
    });
}

#[test]
fn criterion_08_poincare_probe() {
    criterion(8, "poincare-probe", 180.0, || {
        let report = suite_holds("poincare")?;
        let trials: usize = report.config["trials"].parse().unwrap();
        check(trials >= 100, || format!("only {trials} trials"))?;
        let c = report.measured_constants["empirical_C"];
        check(c.is_finite() && c > 0.0, || format!("uniform C = {c}"))?;
        let stab = report
            .evidence
            .iter()
            .find(|r| r.point == "doubled-samples-stability")
            .ok_or("missing doubled-samples row")?;
        check(stab.lhs < 0.10 && stab.margin >= 0.0, || {
            format!("max ratio moved {:.1}% under doubled samples", 100.0 * stab.lhs)
        })?;
        Ok(format!(
            "{trials} fields, max ratio {c:.3}, doubled-samples change {:.2}%",
            100.0 * stab.lhs
        ))
    });
}

#[test]
fn criterion_09_cascade_and_exponential_integrability() {
    criterion(9, "cascade-expint", 180.0, || {
        let cascade = suite_holds("cascade")?;
        for case in ["bounded-indicator", "loglog-scaled/tau=e^-1", "moser-scaled/n=100000"] {
            for k in 2..=6 {
                let key = format!("{case}/cascade/k={k}");
                let ok = cascade
                    .evidence
                    .iter()
                    .find(|r| r.point == key)
                    .is_some_and(|r| r.margin >= 0.0);
                check(ok, || format!("cascade decay fails at {key}"))?;
            }
        }
        let implication_exact = cascade
            .evidence
            .iter()
            .filter(|r| r.point.contains("one-step-implies-cascade"))
            .all(|r| r.margin >= 0.0);
        check(implication_exact, || {
            "one-step to iterated implication violated".to_string()
        })?;

        let expint = suite_holds("expint")?;
        let sups: Vec<(&String, f64)> = expint
            .measured_constants
            .iter()
            .filter(|(k, _)| k.contains("sup"))
            .map(|(k, v)| (k, *v))
            .collect();
        check(!sups.is_empty() && sups.iter().all(|(_, v)| v.is_finite()), || {
            "no finite family suprema reported".to_string()
        })?;
        let sup_max = sups.iter().map(|(_, v)| *v).fold(0.0f64, f64::max);
        Ok(format!(
            "cascade depth 6 over 3 regimes, implication exact, exp-mean sup {sup_max:.3}"
        ))
    });
}

struct CrossCase {
    name: &'static str,
    field: FieldF,
    domain: DomainF,
    d: usize,
    p: f64,
    delta: f64,
}

fn tent(h: f64, r: f64, extent: f64) -> FieldF {
    ScalarField::radial(Profile::new(
        std::sync::Arc::new(move |x: f64| (h * (1.0 - x / r)).max(0.0)),
        0.0,
        extent,
        vec![r],
    ))
}

#[test]
fn criterion_10_cross_method_consistency() {
    criterion(10, "cross-method", 120.0, || {
        let interval = Domain::interval(0.0, 1.0).unwrap();
        let line_ball = Domain::ball0(1.0, 1).unwrap();
        let small_ball = Domain::ball0(1.0 / std::f64::consts::E, 1).unwrap();
        let disk = Domain::ball0(1.0, 2).unwrap();
        let ball3 = Domain::ball0(1.0, 3).unwrap();
        let loglog = ScalarField::loglog(3.0).unwrap();
        let cases = vec![
            CrossCase { name: "line/slope1/delta0.5", field: ScalarField::linear_1d(1.0, 0.0), domain: interval.clone(), d: 1, p: 2.0, delta: 0.5 },
            CrossCase { name: "line/slope1/delta0.1", field: ScalarField::linear_1d(1.0, 0.0), domain: interval.clone(), d: 1, p: 2.0, delta: 0.1 },
            CrossCase { name: "line/slope2/offset", field: ScalarField::linear_1d(2.0, -0.3), domain: interval.clone(), d: 1, p: 2.0, delta: 0.3 },
            CrossCase { name: "line/slope1/p1.5", field: ScalarField::linear_1d(1.0, 0.0), domain: interval.clone(), d: 1, p: 1.5, delta: 0.2 },
            CrossCase { name: "line/slope1/p3", field: ScalarField::linear_1d(1.0, 0.0), domain: interval.clone(), d: 1, p: 3.0, delta: 0.2 },
            CrossCase { name: "line/scaled-tau0.5", field: ScalarField::scaled(ScalarField::linear_1d(1.0, 0.0), 0.5).unwrap(), domain: interval.clone(), d: 1, p: 2.0, delta: 0.2 },
            CrossCase { name: "tent-1d/h2", field: tent(2.0, 1.0, 1.0), domain: line_ball.clone(), d: 1, p: 2.0, delta: 0.25 },
            CrossCase { name: "tent-1d/h1/p1.5", field: tent(1.0, 1.0, 1.0), domain: line_ball, d: 1, p: 1.5, delta: 0.25 },
            CrossCase { name: "loglog-ball", field: loglog.clone(), domain: small_ball.clone(), d: 1, p: 2.0, delta: 1.0 },
            CrossCase { name: "loglog-scaled-tau0.5", field: ScalarField::scaled(loglog, 0.5).unwrap(), domain: small_ball, d: 1, p: 2.0, delta: 1.0 },
            CrossCase { name: "disk/linear-slope1", field: ScalarField::linear([1.0, 0.0, 0.0], 0.0), domain: disk.clone(), d: 2, p: 2.0, delta: 0.3 },
            CrossCase { name: "disk/linear-slope1.5", field: ScalarField::linear([1.5, 0.0, 0.0], 0.0), domain: disk, d: 2, p: 2.0, delta: 0.5 },
            CrossCase { name: "ball3/tent-h2", field: tent(2.0, 0.8, 1.0), domain: ball3, d: 3, p: 2.0, delta: 0.25 },
        ];
        let n = cases.len();
        check(n >= 12, || format!("only {n} cases"))?;
        for (i, case) in cases.iter().enumerate() {
            let params = NonlocalParams::new(case.d, case.p, case.delta).unwrap();
            let cfg = SamplerConfig {
                seed: 0x0acc_2000 + i as u64,
                batch_size: 4096,
                max_batches: 256,
            };
            let det = i_delta_auto(&case.field, &case.domain, &params, 1e-6, &cfg)
                .map_err(|e| format!("{}: deterministic: {e}", case.name))?;
            check(det.method != nonloc_core::Method::Montecarlo, || {
                format!("{}: no deterministic evaluator applied", case.name)
            })?;
            let mc = i_delta_mc(&case.field, &case.domain, &params, &cfg)
                .map_err(|e| format!("{}: mc: {e}", case.name))?;
            // 3 sigma plus a whisker of deterministic truncation error
            let slack = 3.0 * mc.stderr + 1e-4 * det.value.abs();
            check((det.value - mc.value).abs() <= slack, || {
                format!(
                    "{}: {} ({}) vs mc {} +- {}",
                    case.name,
                    det.value,
                    det.method.as_str(),
                    mc.value,
                    mc.stderr
                )
            })?;
        }
        Ok(format!("{n} cases agree within 3 sigma"))
    });
}
