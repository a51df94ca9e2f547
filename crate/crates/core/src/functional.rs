//! Evaluators for the sphere constant K_{d,p}, the nonlocal functional
//! I_{delta,p}(u, O) (Monte Carlo, deterministic 1-D, radial reduction), the
//! raw level integral J_delta, and the mollified BBM functional.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimate::{Estimate, Method};
use crate::fields::ScalarField;
use crate::geometry::{child_seed, dist, sample_direction, Domain, SamplerConfig, UniformSampler};
use crate::levelset::Profile;
use crate::quad::{adaptive_simpson, converge, integrate_graded, QuadOptions};
use crate::real::Real;
use crate::special::{gamma, sphere_area};

/// The triple (d, p, delta). The kernel exponent is d + p.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct NonlocalParams<T> {
    pub d: usize,
    pub p: T,
    pub delta: T,
}

impl<T: Real> NonlocalParams<T> {
    pub fn new(d: usize, p: T, delta: T) -> Result<Self> {
        if d == 0 || d > 3 {
            return Err(Error::InvalidParams(format!("dimension {d} out of range 1..=3")));
        }
        if !(p >= T::one()) {
            return Err(Error::InvalidParams(format!("p must be >= 1, got {p}")));
        }
        if !(delta > T::zero()) {
            return Err(Error::InvalidParams(format!("delta must be positive, got {delta}")));
        }
        Ok(NonlocalParams { d, p, delta })
    }

    /// Kernel exponent d + p.
    pub fn kernel_exponent(&self) -> T {
        T::of_usize(self.d) + self.p
    }

    pub fn with_delta(&self, delta: T) -> Self {
        NonlocalParams { delta, ..*self }
    }
}

/// K_{d,p} = int_{S^{d-1}} |sigma . e|^p dsigma by the Gamma closed form
/// 2 pi^{(d-1)/2} Gamma((p+1)/2) / Gamma((d+p)/2), cross-checked against 1-D
/// polar quadrature; the two routes must agree to 1e-8 relative.
pub fn sphere_constant<T: Real>(d: usize, p: T) -> Result<T> {
    if d == 0 || d > 3 {
        return Err(Error::InvalidParams(format!("dimension {d} out of range 1..=3")));
    }
    let closed = sphere_constant_closed_form(d, p);
    let quad = sphere_constant_quadrature(d, p)?;
    let rel = (closed - quad).abs() / closed.abs().max(T::min_positive_value());
    if rel > T::of(1e-8) {
        return Err(Error::QuadratureMismatch {
            closed_form: closed.as_f64(),
            quadrature: quad.as_f64(),
        });
    }
    Ok(closed)
}

pub fn sphere_constant_closed_form<T: Real>(d: usize, p: T) -> T {
    let pi = T::of(std::f64::consts::PI);
    let half = T::of(0.5);
    T::of(2.0) * pi.powf(T::of_usize(d - 1) * half) * gamma((p + T::one()) * half)
        / gamma((T::of_usize(d) + p) * half)
}

/// Quadrature route: |S^{d-2}| int_0^pi |cos t|^p sin^{d-2} t dt (two unit
/// points for d = 1).
pub fn sphere_constant_quadrature<T: Real>(d: usize, p: T) -> Result<T> {
    if d == 1 {
        return Ok(T::of(2.0));
    }
    let pi = T::of(std::f64::consts::PI);
    let weight_exp = d as i32 - 2;
    let f = move |t: T| t.cos().abs().powf(p) * t.sin().powi(weight_exp).abs();
    let opt = QuadOptions::with_tol(T::of(1e-12));
    // split at pi/2 where |cos| has a kink
    let half_pi = pi * T::of(0.5);
    let v = integrate_graded(&f, T::zero(), half_pi, &opt)?
        + integrate_graded(&f, half_pi, pi, &opt)?;
    Ok(sphere_area::<T>(d - 1) / sphere_area::<T>(1) * T::of(2.0) * v)
}

/// Exact angular factor
/// `A_{d,p}(r1,r2) = iint_{S x S} |r1 s1 - r2 s2|^{-(d+p)} ds1 ds2`,
/// reduced to the angle between the directions. Closed forms are used for
/// d = 1, d = 3, and (d, p) = (2, 2); other cases fall back to quadrature.
pub fn angular_kernel<T: Real>(d: usize, p: T, r1: T, r2: T) -> Result<T> {
    check_off_diagonal(r1, r2)?;
    let m = (T::of_usize(d) + p) * T::of(0.5);
    let a = r1 * r1 + r2 * r2;
    let b = T::of(2.0) * r1 * r2;
    match d {
        1 => {
            let e = T::one() + p;
            Ok(T::of(2.0) * ((r1 - r2).abs().powf(-e) + (r1 + r2).powf(-e)))
        }
        2 if p == T::of(2.0) => {
            // int_0^pi (a - b cos t)^{-2} dt = pi a / (a^2 - b^2)^{3/2}
            let pi = T::of(std::f64::consts::PI);
            let diff = (r1 * r1 - r2 * r2).abs();
            Ok(T::of(4.0) * pi * pi * a / (diff * diff * diff))
        }
        3 => {
            // sin t weight: substitute t -> cos t, elementary antiderivative
            let pi = T::of(std::f64::consts::PI);
            let s = T::of(8.0) * pi * pi;
            if b < T::of(1e-14) * a {
                return Ok(s * T::of(2.0) * a.powf(-m));
            }
            Ok(s * ((a - b).powf(T::one() - m) - (a + b).powf(T::one() - m))
                / (b * (m - T::one())))
        }
        _ => angular_kernel_quadrature(d, p, r1, r2),
    }
}

/// Quadrature route for the angular factor (d >= 2); the independent oracle
/// for the closed forms above.
pub fn angular_kernel_quadrature<T: Real>(d: usize, p: T, r1: T, r2: T) -> Result<T> {
    check_off_diagonal(r1, r2)?;
    if d < 2 || d > 3 {
        return Err(Error::InvalidParams(format!("angular quadrature needs d in 2..=3, got {d}")));
    }
    let m = (T::of_usize(d) + p) * T::of(0.5);
    let a = r1 * r1 + r2 * r2;
    let b = T::of(2.0) * r1 * r2;
    let weight_exp = d as i32 - 2;
    let f = move |t: T| (a - b * t.cos()).powf(-m) * t.sin().powi(weight_exp).abs();
    let pi = T::of(std::f64::consts::PI);
    let v = adaptive_simpson(&f, T::zero(), pi, &QuadOptions::with_tol(T::of(1e-11)))?;
    Ok(sphere_area::<T>(d) * sphere_area::<T>(d - 1) / sphere_area::<T>(1) * T::of(2.0) * v)
}

fn check_off_diagonal<T: Real>(r1: T, r2: T) -> Result<()> {
    if !(r1 > T::zero()) || !(r2 > T::zero()) {
        return Err(Error::InvalidParams(format!("radii must be positive, got {r1}, {r2}")));
    }
    if (r1 - r2).abs() / r1.max(r2) < T::of(1e-12) {
        return Err(Error::DiagonalSingularity {
            r1: r1.as_f64(),
            r2: r2.as_f64(),
        });
    }
    Ok(())
}

/// Unbiased Monte Carlo estimate of I_{delta,p}(u, O) =
/// |O|^2 E[indicator * kernel] with batch-means standard error. The level-set
/// indicator uses strict inequality, so ties contribute nothing.
pub fn i_delta_mc<T: Real>(
    field: &ScalarField<T>,
    domain: &Domain<T>,
    params: &NonlocalParams<T>,
    cfg: &SamplerConfig,
) -> Result<Estimate<T>> {
    if params.d != domain.dim() {
        return Err(Error::InvalidParams(format!(
            "params.d = {} but domain dimension is {}",
            params.d,
            domain.dim()
        )));
    }
    let dim = params.d;
    let exponent = params.kernel_exponent();
    let delta = params.delta;
    let weight = params.delta.powf(params.p);
    let stats = crate::mc::run_batches(cfg, |_, seed| {
        let mut sampler = UniformSampler::new(domain, seed);
        let mut acc = T::zero();
        for _ in 0..cfg.batch_size {
            let (x, y) = sampler.next_pair();
            let du = (field.eval_nan(&x, dim) - field.eval_nan(&y, dim)).abs();
            if du > delta {
                acc += weight * dist(&x, &y, dim).powf(-exponent);
            }
        }
        acc / T::of_usize(cfg.batch_size)
    });
    let vol2 = domain.measure() * domain.measure();
    let value = stats.mean * vol2;
    let stderr = stats.stderr * vol2;
    if !value.is_finite() {
        return Err(Error::NoConvergence {
            value: value.as_f64(),
            change: stderr.as_f64(),
        });
    }
    if value != T::zero() && stderr / value.abs() > T::of(0.1) {
        return Err(Error::HighVariance {
            value: value.as_f64(),
            stderr: stderr.as_f64(),
        });
    }
    let trace = stats
        .trace
        .into_iter()
        .map(|(n, v)| (n, v * vol2))
        .collect();
    Ok(Estimate::monte_carlo(value, stderr, trace))
}

/// Inner 1-D kernel integral `int_{y1}^{y2} |x - y|^{-(1+p)} dy` for a
/// segment that does not contain `x`; elementary antiderivative of
/// `s^{-1-p}`. Returns `+inf` when the segment touches `x`, which the outer
/// adaptive pass reports as `NoConvergence`.
fn segment_kernel_1d<T: Real>(x: T, y1: T, y2: T, p: T) -> T {
    let (s1, s2) = if y1 >= x {
        (y1 - x, y2 - x)
    } else if y2 <= x {
        (x - y2, x - y1)
    } else {
        return T::infinity();
    };
    if s1 <= T::zero() {
        return T::infinity();
    }
    (s1.powf(-p) - s2.powf(-p)) / p
}

/// Deterministic evaluation of I_{delta,p} on an interval for a
/// piecewise-monotone field: the level-set boundary is located by bisection
/// and the inner kernel integral is evaluated analytically; the outer
/// integral is refined until successive estimates agree to `tol`.
pub fn i_delta_exact_1d<T: Real>(
    field: &ScalarField<T>,
    domain: &Domain<T>,
    params: &NonlocalParams<T>,
    tol: T,
) -> Result<Estimate<T>> {
    let (a, b) = match domain {
        Domain::Interval { a, b } => (*a, *b),
        _ => {
            return Err(Error::Unsupported(
                "exact1d needs an interval domain; use the radial evaluator for balls".into(),
            ))
        }
    };
    if params.d != 1 {
        return Err(Error::InvalidParams("exact1d is a d = 1 evaluator".into()));
    }
    let profile = field.line_profile(a, b).ok_or_else(|| {
        Error::Unsupported("field has no piecewise-monotone 1-D profile".into())
    })?;
    let p = params.p;
    let delta = params.delta;
    let outer = |x: T| -> T {
        let u = profile.eval(x);
        profile
            .intervals_abs_above(u, delta)
            .into_iter()
            .map(|(y1, y2)| segment_kernel_1d(x, y1, y2, p))
            .sum()
    };
    let weight = delta.powf(p);
    // Split the outer integral where the integrand is non-smooth: at the
    // profile knots (level-set boundaries jump between pieces there) and at
    // the pre-images of knot-value +- delta, where the nearest boundary
    // distance is extremal and the integrand peaks.
    let knots = profile.knots();
    let mut cuts = knots.clone();
    for &k in &knots {
        let v = profile.eval(k);
        for c in [v - delta, v + delta] {
            for (lo, hi) in profile.intervals_above(c) {
                cuts.push(lo);
                cuts.push(hi);
            }
        }
    }
    cuts.retain(|&x| x >= a && x <= b);
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup();
    let (value, trace) = converge(
        |t| {
            let mut acc = T::zero();
            for w in cuts.windows(2) {
                acc += integrate_graded(&outer, w[0], w[1], &QuadOptions::with_tol(t))?;
            }
            Ok(acc * weight)
        },
        tol,
        3,
    )?;
    Ok(Estimate::deterministic(value, Method::Exact1d, trace))
}

/// Radial reduction: for a radial field on a ball centered at the origin,
/// I_{delta,p} = delta^p iint r1^{d-1} r2^{d-1} A_{d,p}(r1, r2) over the
/// level region in the radii.
pub fn i_delta_radial<T: Real>(
    field: &ScalarField<T>,
    domain: &Domain<T>,
    params: &NonlocalParams<T>,
    tol: T,
) -> Result<Estimate<T>> {
    let (radius, dim) = match domain {
        Domain::Ball { center, radius, dim } if center.iter().all(|c| *c == T::zero()) => {
            (*radius, *dim)
        }
        _ => {
            return Err(Error::Unsupported(
                "radial evaluator needs a ball centered at the origin".into(),
            ))
        }
    };
    if params.d != dim {
        return Err(Error::InvalidParams(format!(
            "params.d = {} but ball dimension is {dim}",
            params.d
        )));
    }
    let profile = field
        .radial_profile(radius)
        .ok_or_else(|| Error::Unsupported("field has no radial profile".into()))?;
    let p = params.p;
    let delta = params.delta;
    let weight = delta.powf(p);
    let compute = |t: T| -> Result<T> {
        let inner_opt = QuadOptions::with_tol(t * T::of(0.1));
        let outer = |r1: T| -> T {
            if r1 <= T::zero() {
                return T::zero();
            }
            let g1 = profile.eval(r1);
            let w1 = r1.powi(dim as i32 - 1);
            profile
                .intervals_abs_above(g1, delta)
                .into_iter()
                .map(|(s1, s2)| {
                    if s1 < r1 && r1 < s2 {
                        return T::infinity();
                    }
                    if dim == 1 {
                        let plus = (segment_plus_kernel(r1, s1, s2, p)) * T::of(2.0);
                        T::of(2.0) * segment_kernel_1d(r1, s1, s2, p) + plus
                    } else {
                        let inner = |r2: T| -> T {
                            if r2 <= T::zero() {
                                return T::zero();
                            }
                            match angular_kernel(dim, p, r1, r2) {
                                Ok(a) => r2.powi(dim as i32 - 1) * a,
                                Err(_) => T::infinity(),
                            }
                        };
                        integrate_graded(&inner, s1, s2, &inner_opt)
                            .unwrap_or_else(|_| T::infinity())
                    }
                })
                .sum::<T>()
                * w1
        };
        integrate_graded(&outer, T::zero(), radius, &QuadOptions::with_tol(t))
            .map(|v| v * weight)
    };
    let (value, trace) = converge(compute, tol, 3)?;
    Ok(Estimate::deterministic(value, Method::Radial, trace))
}

/// `int_{s1}^{s2} (r1 + r2)^{-(1+p)} dr2`, the reflected-sign term of the
/// d = 1 angular sum.
fn segment_plus_kernel<T: Real>(r1: T, s1: T, s2: T, p: T) -> T {
    ((r1 + s1).powf(-p) - (r1 + s2).powf(-p)) / p
}

/// Deterministic route for a linear field on an origin-centered disk.
///
/// With `u = g . x` and the substitution `w = x - y`, the double integral
/// collapses to one radial variable: the overlap `|B ∩ (B - w)|` is the
/// circle-lens area `V(s) = 2R^2 acos(s/2R) - (s/2) sqrt(4R^2 - s^2)`, and
/// the level condition `|g . w| > delta` has angular measure
/// `4 acos(delta / (|g| s))`, so
///
/// ```text
/// I = delta^p int_{delta/|g|}^{2R} s^{-1-p} 4 acos(delta/(|g| s)) V(s) ds.
/// ```
pub fn i_delta_linear_disk<T: Real>(
    gradient_norm: T,
    radius: T,
    params: &NonlocalParams<T>,
    tol: T,
) -> Result<Estimate<T>> {
    if params.d != 2 {
        return Err(Error::InvalidParams("disk evaluator is d = 2 only".into()));
    }
    let p = params.p;
    let delta = params.delta;
    let r2 = radius * T::of(2.0);
    if gradient_norm <= T::zero() {
        return Ok(Estimate::exact(T::zero(), Method::ClosedForm));
    }
    let s_min = (delta / gradient_norm).min(r2);
    let integrand = move |s: T| -> T {
        let c = (delta / (gradient_norm * s)).min(T::one());
        let lens = T::of(2.0) * radius * radius * (s / r2).acos()
            - s * T::of(0.5) * (r2 * r2 - s * s).max(T::zero()).sqrt();
        s.powf(-T::one() - p) * T::of(4.0) * c.acos() * lens
    };
    let weight = delta.powf(p);
    let (value, trace) = converge(
        |t| integrate_graded(&integrand, s_min, r2, &QuadOptions::with_tol(t)).map(|v| v * weight),
        tol,
        3,
    )?;
    Ok(Estimate::deterministic(value, Method::Radial, trace))
}

/// Backend selection: deterministic evaluators where the structure allows,
/// Monte Carlo otherwise.
pub fn i_delta_auto<T: Real>(
    field: &ScalarField<T>,
    domain: &Domain<T>,
    params: &NonlocalParams<T>,
    tol: T,
    cfg: &SamplerConfig,
) -> Result<Estimate<T>> {
    match domain {
        Domain::Interval { a, b } if params.d == 1 => {
            if field.line_profile(*a, *b).is_some() {
                if let Ok(est) = i_delta_exact_1d(field, domain, params, tol) {
                    return Ok(est);
                }
            }
        }
        Domain::Ball { center, radius, dim } if center.iter().all(|c| *c == T::zero()) => {
            if *dim == 2 {
                if let ScalarField::Linear { gradient, .. } = field {
                    let g = crate::geometry::norm(gradient, 2);
                    if let Ok(est) = i_delta_linear_disk(g, *radius, params, tol) {
                        return Ok(est);
                    }
                }
            }
            if field
                .radial_profile(match domain {
                    Domain::Ball { radius, .. } => *radius,
                    _ => unreachable!(),
                })
                .is_some()
            {
                if let Ok(est) = i_delta_radial(field, domain, params, tol) {
                    return Ok(est);
                }
            }
        }
        _ => {}
    }
    i_delta_mc(field, domain, params, cfg)
}

/// Raw level integral J_delta = I_{delta,p} / delta^p, the quantity whose
/// doubling Lemma-type control J_{2 delta} <= 2^{-(p-1)} J_delta concerns.
pub fn raw_level_integral<T: Real>(
    field: &ScalarField<T>,
    domain: &Domain<T>,
    params: &NonlocalParams<T>,
    tol: T,
    cfg: &SamplerConfig,
) -> Result<Estimate<T>> {
    let est = i_delta_auto(field, domain, params, tol, cfg)?;
    let w = params.delta.powf(params.p);
    Ok(Estimate {
        value: est.value / w,
        stderr: est.stderr / w,
        method: est.method,
        trace: est.trace.into_iter().map(|(n, v)| (n, v / w)).collect(),
    })
}

/// Correlated Monte Carlo estimates of J at delta, 2 delta, ..., 2^k delta
/// from a single sample stream, so doubling ratios carry a small shared-noise
/// error. Entry `k` is `J_{2^k delta}` with the standard error of the batch
/// means.
pub fn doubling_mc<T: Real>(
    field: &ScalarField<T>,
    domain: &Domain<T>,
    params: &NonlocalParams<T>,
    k_max: u32,
    cfg: &SamplerConfig,
) -> Result<Vec<Estimate<T>>> {
    if params.d != domain.dim() {
        return Err(Error::InvalidParams("dimension mismatch".into()));
    }
    let dim = params.d;
    let exponent = params.kernel_exponent();
    let levels: Vec<T> = (0..=k_max)
        .map(|k| params.delta * T::of(2.0).powi(k as i32))
        .collect();
    let n = cfg.max_batches.max(2);
    let means: Vec<Vec<T>> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut sampler = UniformSampler::new(domain, child_seed(cfg.seed, i));
            let mut acc = vec![T::zero(); levels.len()];
            for _ in 0..cfg.batch_size {
                let (x, y) = sampler.next_pair();
                let du = (field.eval_nan(&x, dim) - field.eval_nan(&y, dim)).abs();
                let kernel = dist(&x, &y, dim).powf(-exponent);
                for (j, &lvl) in levels.iter().enumerate() {
                    if du > lvl {
                        acc[j] += kernel;
                    } else {
                        break; // levels increase, indicators are nested
                    }
                }
            }
            acc.iter()
                .map(|&s| s / T::of_usize(cfg.batch_size))
                .collect()
        })
        .collect();
    let vol2 = domain.measure() * domain.measure();
    let nf = T::of_usize(n);
    let mut out = Vec::with_capacity(levels.len());
    for j in 0..levels.len() {
        let mean = means.iter().map(|m| m[j]).sum::<T>() / nf;
        let var = means
            .iter()
            .map(|m| (m[j] - mean) * (m[j] - mean))
            .sum::<T>()
            / (nf - T::one());
        let stderr = (var / nf).sqrt();
        out.push(Estimate::monte_carlo(mean * vol2, stderr * vol2, vec![]));
    }
    Ok(out)
}

/// Mollifier families for the BBM functional. Both satisfy the
/// concentration constraints: unit radial mass and vanishing tail mass.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum MollifierSpec<T> {
    /// `rho(r) = d n^d` on `(0, 1/n)`.
    RescaledIndicator { n: u64 },
    /// `rho(r) = s r^{s-d}` on `(0, 1)`; concentrates as `s -> 0`.
    PowerTail { s: T },
}

impl<T: Real> MollifierSpec<T> {
    pub fn validate(&self) -> Result<()> {
        match self {
            MollifierSpec::RescaledIndicator { n } if *n == 0 => {
                Err(Error::InvalidParams("rescaled indicator needs n >= 1".into()))
            }
            MollifierSpec::PowerTail { s } if !(*s > T::zero() && *s <= T::one()) => {
                Err(Error::InvalidParams(format!("power tail needs s in (0, 1], got {s}")))
            }
            _ => Ok(()),
        }
    }

    /// Draw `r` with density `rho(r) r^{d-1}` (unit mass by construction).
    pub fn sample_radius<R: Rng>(&self, d: usize, rng: &mut R) -> T {
        let u: T = rng.gen_range(T::min_positive_value()..T::one());
        match self {
            MollifierSpec::RescaledIndicator { n } => {
                u.powf(T::one() / T::of_usize(d)) / T::of_usize(*n as usize)
            }
            MollifierSpec::PowerTail { s } => u.powf(T::one() / *s),
        }
    }

    /// `int_tau^inf rho(r) r^{d-1} dr`; must vanish for each fixed tau as the
    /// family concentrates.
    pub fn radial_tail_mass(&self, d: usize, tau: T) -> T {
        if tau <= T::zero() {
            return T::one();
        }
        match self {
            MollifierSpec::RescaledIndicator { n } => {
                let edge = T::one() / T::of_usize(*n as usize);
                if tau >= edge {
                    T::zero()
                } else {
                    T::one() - (tau / edge).powi(d as i32)
                }
            }
            MollifierSpec::PowerTail { s } => {
                if tau >= T::one() {
                    T::zero()
                } else {
                    T::one() - tau.powf(*s)
                }
            }
        }
    }
}

/// Mollified BBM functional
/// `iint |u(x)-u(y)|^p |x-y|^{-p} rho(|x-y|) dx dy`
/// by Monte Carlo with the pair distance importance-sampled proportional to
/// `rho(r) r^{d-1}`.
pub fn bbm_functional<T: Real>(
    field: &ScalarField<T>,
    domain: &Domain<T>,
    p: T,
    mollifier: &MollifierSpec<T>,
    cfg: &SamplerConfig,
) -> Result<Estimate<T>> {
    mollifier.validate()?;
    let dim = domain.dim();
    let scale = domain.measure() * sphere_area::<T>(dim);
    // Radii below float resolution make y round to x and silently drop the
    // contribution; the difference quotient has already reached its r -> 0
    // limit well above that scale, so evaluate tiny radii at a floor instead.
    let (lo, hi) = domain.bounding_box();
    let diam = (0..dim)
        .map(|i| hi[i] - lo[i])
        .fold(T::zero(), T::max);
    let r_floor = diam * T::of(1e-9);
    let stats = crate::mc::run_batches(cfg, |_, seed| {
        let mut sampler = UniformSampler::new(domain, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(child_seed(seed, 0x6d6f6c6c));
        let mut acc = T::zero();
        for _ in 0..cfg.batch_size {
            let x = sampler.next_point();
            let r = mollifier.sample_radius(dim, &mut rng).max(r_floor);
            let w = sample_direction::<T, _>(dim, &mut rng);
            let mut y = x;
            for i in 0..dim {
                y[i] = x[i] + r * w[i];
            }
            if domain.contains(&y) && r > T::zero() {
                let du = (field.eval_nan(&x, dim) - field.eval_nan(&y, dim)).abs();
                // (du/r)^p stays scaled even when r is denormally small,
                // where du^p * r^{-p} would produce 0 * inf
                acc += (du / r).powf(p);
            }
        }
        acc / T::of_usize(cfg.batch_size)
    });
    let value = stats.mean * scale;
    let stderr = stats.stderr * scale;
    if !value.is_finite() {
        return Err(Error::NoConvergence {
            value: value.as_f64(),
            change: stderr.as_f64(),
        });
    }
    if value != T::zero() && stderr / value.abs() > T::of(0.1) {
        return Err(Error::HighVariance {
            value: value.as_f64(),
            stderr: stderr.as_f64(),
        });
    }
    let trace = stats
        .trace
        .into_iter()
        .map(|(n, v)| (n, v * scale))
        .collect();
    Ok(Estimate::monte_carlo(value, stderr, trace))
}

/// Profile-level radial evaluator used by verifiers that build profiles
/// directly.
pub fn i_delta_radial_profile<T: Real>(
    profile: &Profile<T>,
    dim: usize,
    params: &NonlocalParams<T>,
    tol: T,
) -> Result<Estimate<T>> {
    let field = ScalarField::Radial(profile.clone());
    let domain = Domain::ball0(profile.hi(), dim)?;
    i_delta_radial(&field, &domain, params, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::ScalarField;
    use std::f64::consts::PI;

    fn params(d: usize, p: f64, delta: f64) -> NonlocalParams<f64> {
        NonlocalParams::new(d, p, delta).unwrap()
    }

    #[test]
    fn sphere_constant_spot_values() {
        // d = 1: two-point sphere, value 2 for every p
        assert!((sphere_constant(1, 2.0f64).unwrap() - 2.0).abs() < 1e-12);
        assert!((sphere_constant(1, 3.5f64).unwrap() - 2.0).abs() < 1e-12);
        // K_{2,2} = pi, K_{3,2} = 4 pi / 3
        assert!((sphere_constant(2, 2.0f64).unwrap() - PI).abs() < 1e-10);
        assert!((sphere_constant(3, 2.0f64).unwrap() - 4.0 * PI / 3.0).abs() < 1e-10);
    }

    #[test]
    fn sphere_constant_routes_agree() {
        for d in 1..=3usize {
            for &p in &[1.0f64, 2.0, 3.0, 4.5] {
                let c = sphere_constant_closed_form(d, p);
                let q = sphere_constant_quadrature(d, p).unwrap();
                assert!(
                    ((c - q) / c).abs() < 1e-8,
                    "d={d} p={p}: closed {c} vs quad {q}"
                );
            }
        }
    }

    #[test]
    fn angular_kernel_closed_forms_match_quadrature() {
        for &(d, p) in &[(2usize, 2.0f64), (3, 2.0), (3, 1.5), (3, 3.0)] {
            for &(r1, r2) in &[(0.3, 0.7), (0.9, 0.2), (1.0, 0.5)] {
                let a = angular_kernel(d, p, r1, r2).unwrap();
                let q = angular_kernel_quadrature(d, p, r1, r2).unwrap();
                assert!(
                    ((a - q) / q).abs() < 1e-7,
                    "d={d} p={p} r=({r1},{r2}): {a} vs {q}"
                );
            }
        }
    }

    #[test]
    fn angular_kernel_homogeneity() {
        // A(c r1, c r2) = c^{-(d+p)} A(r1, r2)
        for &(d, p) in &[(1usize, 2.0f64), (2, 2.0), (3, 2.5)] {
            let a = angular_kernel(d, p, 0.4, 0.8).unwrap();
            let b = angular_kernel(d, p, 0.2, 0.4).unwrap();
            let scale = 2.0f64.powf(d as f64 + p);
            assert!(((b / a) - scale).abs() / scale < 1e-9, "d={d} p={p}");
        }
    }

    #[test]
    fn angular_kernel_diagonal_is_rejected() {
        assert!(matches!(
            angular_kernel(2, 2.0f64, 0.5, 0.5),
            Err(Error::DiagonalSingularity { .. })
        ));
    }

    #[test]
    fn exact_1d_linear_closed_form() {
        // I_{delta,2}(x -> x, (0,1)) = (1 - delta)^2
        let field = ScalarField::linear_1d(1.0f64, 0.0);
        let domain = Domain::interval(0.0, 1.0).unwrap();
        for &delta in &[0.5f64, 0.2, 0.1, 0.05] {
            let est = i_delta_exact_1d(&field, &domain, &params(1, 2.0, delta), 1e-8).unwrap();
            let exact = (1.0 - delta) * (1.0 - delta);
            assert!(
                (est.value - exact).abs() < 1e-6,
                "delta={delta}: {} vs {exact}",
                est.value
            );
        }
    }

    #[test]
    fn monte_carlo_matches_exact_1d() {
        let field = ScalarField::linear_1d(1.0f64, 0.0);
        let domain = Domain::interval(0.0, 1.0).unwrap();
        let cfg = SamplerConfig {
            seed: 11,
            batch_size: 20_000,
            max_batches: 64,
        };
        let est = i_delta_mc(&field, &domain, &params(1, 2.0, 0.2), &cfg).unwrap();
        let exact = 0.64;
        assert!(
            (est.value - exact).abs() < 3.0 * est.stderr + 1e-9,
            "{} +- {} vs {exact}",
            est.value,
            est.stderr
        );
    }

    #[test]
    fn indicator_at_height_delta_vanishes() {
        // |u(x) - u(y)| <= delta everywhere, strict inequality never fires
        let region = Domain::ball0(0.3f64, 1).unwrap();
        let field = ScalarField::indicator(region, 0.1);
        let domain = Domain::interval(-1.0, 1.0).unwrap();
        let est = i_delta_mc(&field, &domain, &params(1, 2.0, 0.1), &SamplerConfig::default());
        // zero-valued estimates skip the relative-variance gate
        assert_eq!(est.unwrap().value, 0.0);
    }

    #[test]
    fn shift_invariance() {
        let domain = Domain::interval(0.0, 1.0).unwrap();
        let a = i_delta_exact_1d(
            &ScalarField::linear_1d(2.0f64, 0.0),
            &domain,
            &params(1, 2.0, 0.3),
            1e-8,
        )
        .unwrap();
        let b = i_delta_exact_1d(
            &ScalarField::linear_1d(2.0f64, 5.0),
            &domain,
            &params(1, 2.0, 0.3),
            1e-8,
        )
        .unwrap();
        assert!((a.value - b.value).abs() < 1e-9);
    }

    #[test]
    fn radial_matches_exact_1d_on_symmetric_interval() {
        // |x| on (-1, 1) equals the radial field on the 1-D ball B_1
        let domain = Domain::ball0(1.0f64, 1).unwrap();
        let profile = Profile::new(std::sync::Arc::new(|r: f64| r), 0.0, 1.0, vec![]);
        let field = ScalarField::radial(profile);
        let pr = params(1, 2.0, 0.25);
        let a = i_delta_radial(&field, &domain, &pr, 1e-7).unwrap();
        let b = i_delta_exact_1d(&field, &Domain::interval(-1.0, 1.0).unwrap(), &pr, 1e-7)
            .unwrap();
        assert!(
            (a.value - b.value).abs() / b.value < 1e-4,
            "radial {} vs exact1d {}",
            a.value,
            b.value
        );
    }

    #[test]
    fn radial_2d_linear_matches_monte_carlo() {
        let domain = Domain::ball0(1.0f64, 2).unwrap();
        let profile = Profile::new(std::sync::Arc::new(|r: f64| r), 0.0, 1.0, vec![]);
        let field = ScalarField::radial(profile);
        let pr = params(2, 2.0, 0.3);
        let det = i_delta_radial(&field, &domain, &pr, 1e-6).unwrap();
        let cfg = SamplerConfig {
            seed: 5,
            batch_size: 20_000,
            max_batches: 64,
        };
        let mc = i_delta_mc(&field, &domain, &pr, &cfg).unwrap();
        assert!(
            (det.value - mc.value).abs() < 3.0 * mc.stderr,
            "radial {} vs mc {} +- {}",
            det.value,
            mc.value,
            mc.stderr
        );
    }

    #[test]
    fn doubling_ratio_for_linear_field() {
        // J_{2 delta} / J_delta = (0.8^2/0.04) / (0.9^2/0.01) / ... with
        // I = (1-delta)^2: J = (1-delta)^2 / delta^2, ratio at delta = 0.1 is
        // (0.8/0.9)^2 / 4 = 16/81
        let field = ScalarField::linear_1d(1.0f64, 0.0);
        let domain = Domain::interval(0.0, 1.0).unwrap();
        let cfg = SamplerConfig {
            seed: 23,
            batch_size: 20_000,
            max_batches: 64,
        };
        let ests = doubling_mc(&field, &domain, &params(1, 2.0, 0.1), 1, &cfg).unwrap();
        let ratio = ests[1].value / ests[0].value;
        let exact = 16.0 / 81.0;
        assert!((ratio - exact).abs() < 0.02, "ratio {ratio} vs {exact}");
        assert!(ratio <= 0.5); // 2^{-(p-1)} with p = 2
    }

    #[test]
    fn bbm_functional_approaches_gradient_energy() {
        // u = x on (0,1), p = 2: limit K_{1,2} * (1/1) * int |u'|^2 = 2
        let field = ScalarField::linear_1d(1.0f64, 0.0);
        let domain = Domain::interval(0.0, 1.0).unwrap();
        let cfg = SamplerConfig {
            seed: 31,
            batch_size: 40_000,
            max_batches: 64,
        };
        let v32 = bbm_functional(
            &field,
            &domain,
            2.0,
            &MollifierSpec::RescaledIndicator { n: 32 },
            &cfg,
        )
        .unwrap();
        // boundary-layer deficit is O(1/n)
        assert!(
            (v32.value - 2.0).abs() < 0.1,
            "n=32: {} +- {}",
            v32.value,
            v32.stderr
        );
        let v8 = bbm_functional(
            &field,
            &domain,
            2.0,
            &MollifierSpec::RescaledIndicator { n: 8 },
            &cfg,
        )
        .unwrap();
        assert!((2.0 - v8.value) > (2.0 - v32.value) - 3.0 * (v8.stderr + v32.stderr));
    }

    #[test]
    fn mollifier_tail_mass_vanishes() {
        let tau = 0.1f64;
        let big = MollifierSpec::RescaledIndicator { n: 4 };
        let small = MollifierSpec::RescaledIndicator { n: 64 };
        assert!(big.radial_tail_mass(1, tau) > 0.0);
        assert_eq!(small.radial_tail_mass(1, tau), 0.0);
        // tail mass 1 - tau^s shrinks as s -> 0 (concentration)
        let p1 = MollifierSpec::PowerTail { s: 0.5f64 };
        let p2 = MollifierSpec::PowerTail { s: 0.05f64 };
        assert!(p2.radial_tail_mass(1, tau) < p1.radial_tail_mass(1, tau));
        assert!(p2.radial_tail_mass(1, tau) > 0.0);
    }

    #[test]
    fn loglog_functional_is_finite() {
        let field = ScalarField::loglog(3.0f64).unwrap();
        let domain = Domain::ball0((-1.0f64).exp(), 1).unwrap();
        let est = i_delta_radial(&field, &domain, &params(1, 2.0, 1.0), 1e-3).unwrap();
        assert!(est.value.is_finite() && est.value > 0.0, "{}", est.value);
        // the refinement ladder is recorded (convergence itself is enforced
        // inside the evaluator)
        assert_eq!(est.trace.len(), 3);
    }

    #[test]
    fn raw_level_integral_scales_out_delta_power() {
        let field = ScalarField::linear_1d(1.0f64, 0.0);
        let domain = Domain::interval(0.0, 1.0).unwrap();
        let pr = params(1, 2.0, 0.1);
        let i = i_delta_exact_1d(&field, &domain, &pr, 1e-8).unwrap();
        let j = raw_level_integral(&field, &domain, &pr, 1e-8, &SamplerConfig::default())
            .unwrap();
        assert!((j.value - i.value / 0.01).abs() < 1e-6 * j.value.abs());
    }
}

#[cfg(test)]
mod disk_tests {
    use super::*;
    use crate::fields::ScalarField;

    #[test]
    fn linear_disk_matches_monte_carlo() {
        let params = NonlocalParams::new(2, 2.0f64, 0.3).unwrap();
        let det = i_delta_linear_disk(1.0, 1.0, &params, 1e-7).unwrap();
        let field = ScalarField::linear([0.6, 0.8, 0.0], 0.0);
        let domain = Domain::ball0(1.0, 2).unwrap();
        let cfg = SamplerConfig {
            seed: 77,
            batch_size: 40_000,
            max_batches: 64,
        };
        let mc = i_delta_mc(&field, &domain, &params, &cfg).unwrap();
        assert!(
            (det.value - mc.value).abs() < 3.0 * mc.stderr,
            "disk {} vs mc {} +- {}",
            det.value,
            mc.value,
            mc.stderr
        );
        // auto route picks the deterministic evaluator
        let auto = i_delta_auto(&field, &domain, &params, 1e-7, &cfg).unwrap();
        assert_eq!(auto.method, Method::Radial);
        assert!((auto.value - det.value).abs() < 1e-9);
    }

    #[test]
    fn linear_disk_small_delta_approaches_bbm_slope() {
        // I -> (1/p) K_{2,2} |g|^2 |B_1| = (1/2) pi^2 as delta -> 0
        let target = 0.5 * std::f64::consts::PI * std::f64::consts::PI;
        let params = NonlocalParams::new(2, 2.0f64, 0.01).unwrap();
        let est = i_delta_linear_disk(1.0, 1.0, &params, 1e-7).unwrap();
        assert!(
            (est.value - target).abs() / target < 0.05,
            "{} vs {target}",
            est.value
        );
    }
}
