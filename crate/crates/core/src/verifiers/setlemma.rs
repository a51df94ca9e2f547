//! Verifies the set-geometry lower bound: for nested sets `E ⊂ F` (F a ball,
//! E a ball, annulus, or union of balls with `|E| = |B_rho|`) and points `x`
//! with `B_{2 rho}(x) ⊂ F`,
//!
//! ```text
//! int_{F \ E} |x-y|^{-lambda} dy  >=  C_{d,lambda} |E|^{1 - lambda/d},
//! ```
//!
//! with `lambda = d + p > d`; and the integrated form over a set `D` of
//! admissible points, `iint_{D x (F \ E)} ... >= C |D| |E|^{-p/d}`. The
//! constants are not specified, so the suite asserts a uniform positive
//! floor on the measured ratio, stability of the ratio as `|E| -> 0`, and a
//! closed-form oracle in d = 1.

use crate::error::Result;
use crate::geometry::{dist, Domain, Point, SamplerConfig, UniformSampler};
use crate::mc::run_batches;
use crate::report::VerificationReport;
use crate::special::unit_ball_volume;

use super::VerifyOptions;

#[derive(Clone)]
enum Shape {
    /// `B_rho(x)`.
    CenteredBall,
    /// Ball of the same measure with `x` inside but off-center.
    OffsetBall,
    /// Annulus `rho/2 < |y - x| < rho_out` of measure `|B_rho|`, with the
    /// evaluation point moved into the ring.
    Annulus,
    /// Half the measure around `x`, the other half in a far ball.
    TwoBalls,
}

impl Shape {
    fn name(&self) -> &'static str {
        match self {
            Shape::CenteredBall => "ball",
            Shape::OffsetBall => "offset-ball",
            Shape::Annulus => "annulus",
            Shape::TwoBalls => "two-balls",
        }
    }
}

struct Config {
    d: usize,
    /// Radius parameter: `|E| = |B_rho|`.
    rho: f64,
    /// F = B_R(0).
    big_r: f64,
    /// Evaluation point (1-D coordinate along the first axis).
    x: Point<f64>,
    /// Membership test for E.
    contains: Box<dyn Fn(&Point<f64>) -> bool + Sync>,
}

fn make_config(d: usize, shape: Shape, rho: f64, big_r: f64) -> Config {
    let mut x = [0.0; 3];
    match shape {
        Shape::CenteredBall => {
            let c = x;
            Config {
                d,
                rho,
                big_r,
                x,
                contains: Box::new(move |y| dist(y, &c, d) < rho),
            }
        }
        Shape::OffsetBall => {
            // E centered at rho/3 along the first axis, x at the origin
            let mut c = [0.0; 3];
            c[0] = rho / 3.0;
            Config {
                d,
                rho,
                big_r,
                x,
                contains: Box::new(move |y| dist(y, &c, d) < rho),
            }
        }
        Shape::Annulus => {
            let inner = rho / 2.0;
            let outer = (inner.powi(d as i32) + rho.powi(d as i32)).powf(1.0 / d as f64);
            let c = [0.0; 3];
            x[0] = (inner + outer) / 2.0;
            Config {
                d,
                rho,
                big_r,
                x,
                contains: Box::new(move |y| {
                    let r = dist(y, &c, d);
                    r > inner && r < outer
                }),
            }
        }
        Shape::TwoBalls => {
            let half = rho * 0.5f64.powf(1.0 / d as f64);
            let c1 = x;
            let mut c2 = [0.0; 3];
            c2[0] = big_r * 0.6;
            Config {
                d,
                rho,
                big_r,
                x,
                contains: Box::new(move |y| dist(y, &c1, d) < half || dist(y, &c2, d) < half),
            }
        }
    }
}

impl Config {
    fn e_measure(&self) -> f64 {
        unit_ball_volume::<f64>(self.d) * self.rho.powi(self.d as i32)
    }

    /// Monte Carlo `int_{F \ E} |x - y|^{-lambda} dy` with batch stderr.
    fn integral(&self, lambda: f64, seed: u64, batch: usize) -> (f64, f64) {
        let f = Domain::ball0(self.big_r, self.d).unwrap();
        let cfg = SamplerConfig {
            seed,
            batch_size: batch,
            max_batches: 64,
        };
        let stats = run_batches(&cfg, |_, s| {
            let mut sampler = UniformSampler::new(&f, s);
            let mut acc = 0.0;
            for _ in 0..cfg.batch_size {
                let y = sampler.next_point();
                if !(self.contains)(&y) {
                    acc += dist(&self.x, &y, self.d).powf(-lambda);
                }
            }
            acc / cfg.batch_size as f64
        });
        (stats.mean * f.measure(), stats.stderr * f.measure())
    }
}

pub fn verify(opt: &VerifyOptions) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("setlemma");
    report.config_entry("seed", opt.seed);
    report.config_entry("effort", opt.effort);
    let batch = ((20_000.0 * opt.effort) as usize).max(1000);
    let mut min_ratio = f64::INFINITY;

    // d = 1 oracle: E = (x - rho, x + rho) concentric in F = (x - R, x + R),
    // lambda = 2: integral = (2/rho)(1 - rho/R), ratio = 4 (1 - rho/R)
    {
        let rho = 0.1;
        let big_r = 1.0;
        let c = make_config(1, Shape::CenteredBall, rho, big_r);
        let (v, s) = c.integral(2.0, opt.seed ^ 0x07ac1e, batch);
        let exact = 2.0 / rho * (1.0 - rho / big_r);
        report.push_row("oracle-1d/lambda=2", (v - exact).abs(), 3.0 * s, 3.0 * s - (v - exact).abs());
    }

    let mut seed_idx = 0u64;
    for &d in &[1usize, 2] {
        for &p in &[1.0f64, 2.0] {
            let lambda = d as f64 + p;
            for shape in [
                Shape::CenteredBall,
                Shape::OffsetBall,
                Shape::Annulus,
                Shape::TwoBalls,
            ] {
                let mut ratios = Vec::new();
                for &rho in &[0.2, 0.1, 0.05, 0.025] {
                    let c = make_config(d, shape.clone(), rho, 1.0);
                    seed_idx += 1;
                    let (v, s) = c.integral(lambda, opt.seed ^ (seed_idx << 16), batch);
                    let bound_scale = c.e_measure().powf(1.0 - lambda / d as f64);
                    let ratio = v / bound_scale;
                    let sigma = s / bound_scale;
                    ratios.push(ratio);
                    min_ratio = min_ratio.min(ratio);
                    // positive floor, 3 sigma below the estimate
                    report.push_row(
                        format!("d={d}/p={p}/{}/rho={rho}", shape.name()),
                        0.05,
                        ratio - 3.0 * sigma,
                        ratio - 3.0 * sigma - 0.05,
                    );
                }
                // no decay toward 0 as |E| -> 0
                let first = ratios[0];
                let last = *ratios.last().unwrap();
                report.push_row(
                    format!("d={d}/p={p}/{}/stability", shape.name()),
                    0.5 * first,
                    last,
                    last - 0.5 * first,
                );
            }
        }
    }

    // Integrated form: D = B_{rho/4}(0) inside E = B_rho(0); for x in D the
    // complement is at distance >= 3 rho / 4, so
    // iint >= |D| (R + rho)^{-lambda} ... measured ratio against
    // |D| |E|^{-p/d} must stay positive.
    for &d in &[1usize, 2] {
        let p = 2.0;
        let lambda = d as f64 + p;
        for &rho in &[0.2, 0.1, 0.05] {
            let e = make_config(d, Shape::CenteredBall, rho, 1.0);
            let d_ball = Domain::ball0(rho / 4.0, d)?;
            let f_ball = Domain::ball0(1.0, d)?;
            seed_idx += 1;
            let cfg = SamplerConfig {
                seed: opt.seed ^ 0xd0 ^ (seed_idx << 16),
                batch_size: batch,
                max_batches: 64,
            };
            let stats = run_batches(&cfg, |_, s| {
                let mut dx = UniformSampler::new(&d_ball, s);
                let mut fy = UniformSampler::new(&f_ball, s ^ 0x9e37_79b9);
                let mut acc = 0.0;
                for _ in 0..cfg.batch_size {
                    let x = dx.next_point();
                    let y = fy.next_point();
                    if !(e.contains)(&y) {
                        acc += dist(&x, &y, d).powf(-lambda);
                    }
                }
                acc / cfg.batch_size as f64
            });
            let v = stats.mean * d_ball.measure() * f_ball.measure();
            let s = stats.stderr * d_ball.measure() * f_ball.measure();
            let bound_scale = d_ball.measure() * e.e_measure().powf(-p / d as f64);
            let ratio = v / bound_scale;
            let sigma = s / bound_scale;
            min_ratio = min_ratio.min(ratio);
            report.push_row(
                format!("d={d}/integrated/rho={rho}"),
                0.05,
                ratio - 3.0 * sigma,
                ratio - 3.0 * sigma - 0.05,
            );
        }
    }

    report.constant("empirical_C", min_ratio);
    report.finish_by_margins();
    Ok(report)
}
