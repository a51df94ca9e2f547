//! Catalog of scalar fields, plus derived queries: means, superlevel-set
//! measures, the radial reflection extension, and scaling.

use std::io::BufRead;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::estimate::{Estimate, Method};
use crate::geometry::{norm, Domain, Point, SamplerConfig, UniformSampler};
use crate::levelset::{total_length, Profile};
use crate::mc::run_batches;
use crate::quad::{integrate_graded, QuadOptions};
use crate::real::Real;
use crate::special::unit_ball_volume;

const INV_E: f64 = 1.0 / std::f64::consts::E;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Interp {
    Nearest,
    Linear,
}

/// Regular grid of node values on an axis-aligned box. Node `k` on axis `i`
/// sits at `lo + k (hi - lo)/(n - 1)`; values are stored with the first axis
/// slowest.
#[derive(Clone, Debug)]
pub struct Grid<T> {
    pub dim: usize,
    pub shape: [usize; 3],
    pub lo: Point<T>,
    pub hi: Point<T>,
    pub values: Vec<T>,
    pub interp: Interp,
}

impl<T: Real> Grid<T> {
    pub fn new(
        dim: usize,
        shape: [usize; 3],
        lo: Point<T>,
        hi: Point<T>,
        values: Vec<T>,
        interp: Interp,
    ) -> Result<Self> {
        if dim == 0 || dim > 3 {
            return Err(Error::InvalidParams(format!("grid dimension {dim}")));
        }
        let expected: usize = shape.iter().take(dim).product();
        if values.len() != expected {
            return Err(Error::InvalidParams(format!(
                "grid expects {expected} values, got {}",
                values.len()
            )));
        }
        for i in 0..dim {
            if shape[i] == 0 {
                return Err(Error::InvalidParams("grid axis with zero nodes".into()));
            }
            if !(hi[i] > lo[i]) {
                return Err(Error::InvalidDomain("grid box needs hi > lo".into()));
            }
        }
        Ok(Grid {
            dim,
            shape,
            lo,
            hi,
            values,
            interp,
        })
    }

    /// Plain-text CSV import. Header line `d,nx[,ny[,nz]],lo...,hi...`,
    /// followed by the node values in row-major order (any number per line).
    pub fn from_csv<R: BufRead>(reader: R, interp: Interp) -> Result<Self> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty grid file".into()))??;
        let nums: Vec<f64> = header
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("grid header: {e}")))
            })
            .collect::<Result<_>>()?;
        if nums.is_empty() {
            return Err(Error::Parse("empty grid header".into()));
        }
        let dim = nums[0] as usize;
        if dim == 0 || dim > 3 || nums.len() != 1 + 3 * dim {
            return Err(Error::Parse(format!(
                "grid header needs 1 + 3d fields for d={dim}, got {}",
                nums.len()
            )));
        }
        let mut shape = [1usize; 3];
        for i in 0..dim {
            shape[i] = nums[1 + i] as usize;
        }
        let mut lo = [T::zero(); 3];
        let mut hi = [T::zero(); 3];
        for i in 0..dim {
            lo[i] = T::of(nums[1 + dim + i]);
            hi[i] = T::of(nums[1 + 2 * dim + i]);
        }
        let mut values = Vec::new();
        for line in lines {
            let line = line?;
            for tok in line.split(',') {
                let tok = tok.trim();
                if tok.is_empty() {
                    continue;
                }
                values.push(T::of(tok
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("grid value: {e}")))?));
            }
        }
        Grid::new(dim, shape, lo, hi, values, interp)
    }

    fn node(&self, idx: [usize; 3]) -> T {
        let mut flat = 0usize;
        for i in 0..self.dim {
            flat = flat * self.shape[i] + idx[i];
        }
        self.values[flat]
    }

    fn axis_coord(&self, i: usize, x: T) -> T {
        if self.shape[i] == 1 {
            return T::zero();
        }
        let n = T::of_usize(self.shape[i] - 1);
        ((x - self.lo[i]) / (self.hi[i] - self.lo[i]) * n)
            .max(T::zero())
            .min(n)
    }

    pub fn eval(&self, x: &Point<T>) -> T {
        match self.interp {
            Interp::Nearest => {
                let mut idx = [0usize; 3];
                for i in 0..self.dim {
                    idx[i] = self.axis_coord(i, x[i]).round().as_f64() as usize;
                }
                self.node(idx)
            }
            Interp::Linear => {
                let mut base = [0usize; 3];
                let mut frac = [T::zero(); 3];
                for i in 0..self.dim {
                    let c = self.axis_coord(i, x[i]);
                    let f = c.floor();
                    base[i] = (f.as_f64() as usize).min(self.shape[i].saturating_sub(2));
                    frac[i] = c - T::of_usize(base[i]);
                }
                let mut acc = T::zero();
                for corner in 0..(1usize << self.dim) {
                    let mut idx = base;
                    let mut w = T::one();
                    for i in 0..self.dim {
                        if self.shape[i] == 1 {
                            continue;
                        }
                        if corner & (1 << i) != 0 {
                            idx[i] = base[i] + 1;
                            w *= frac[i];
                        } else {
                            w *= T::one() - frac[i];
                        }
                    }
                    acc += w * self.node(idx);
                }
                acc
            }
        }
    }
}

/// The field catalog. `eval` is pure; fields are immutable and shareable.
#[derive(Clone)]
pub enum ScalarField<T> {
    Constant(T),
    Linear {
        gradient: Point<T>,
        offset: T,
    },
    /// `u = height * 1_region`.
    Indicator {
        region: Domain<T>,
        height: T,
    },
    /// `u(x) = (ln lambda)^{-1} ln ln (1/|x|)` on the ball of radius 1/e.
    LogLog {
        lambda: T,
    },
    /// Radial log-plateau field `g_n`: `(ln n)^{1/q}` on `[0, 1/n]`,
    /// `ln(1/r) / (ln n)^{1/q'}` on `[1/n, 1/e]`, `q' = q/(q-1)`.
    Moser {
        n: u64,
        q: T,
    },
    /// `u(x) = profile(|x|)` supported on `|x| <= profile.hi()`.
    Radial(Profile<T>),
    Grid(Grid<T>),
    /// `u_tau(x) = u(tau x)`.
    Scaled {
        inner: Box<ScalarField<T>>,
        tau: T,
    },
    /// `u_k = min{k, max{u, -k}}`.
    Truncated {
        inner: Box<ScalarField<T>>,
        cap: T,
    },
    /// Radial reflection extension to the 3/2 ball: for `1 < |x| < 3/2`,
    /// `u((2 - |x|) x / |x|)`.
    Reflected {
        inner: Box<ScalarField<T>>,
    },
}

fn loglog_floor<T: Real>() -> T {
    // keep ln ln (1/r) finite; the excluded mass is below any tolerance used
    T::of(1e-300).max(T::min_positive_value())
}

impl<T: Real> ScalarField<T> {
    pub fn constant(c: T) -> Self {
        ScalarField::Constant(c)
    }

    pub fn linear_1d(slope: T, offset: T) -> Self {
        let mut gradient = [T::zero(); 3];
        gradient[0] = slope;
        ScalarField::Linear { gradient, offset }
    }

    pub fn linear(gradient: Point<T>, offset: T) -> Self {
        ScalarField::Linear { gradient, offset }
    }

    pub fn indicator(region: Domain<T>, height: T) -> Self {
        ScalarField::Indicator { region, height }
    }

    pub fn loglog(lambda: T) -> Result<Self> {
        if !(lambda > T::one()) {
            return Err(Error::InvalidParams(format!("loglog needs lambda > 1, got {lambda}")));
        }
        Ok(ScalarField::LogLog { lambda })
    }

    pub fn moser(n: u64, q: T) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParams(format!("moser needs n >= 3, got {n}")));
        }
        if !(q > T::one()) {
            return Err(Error::InvalidParams(format!("moser needs q > 1, got {q}")));
        }
        Ok(ScalarField::Moser { n, q })
    }

    pub fn radial(profile: Profile<T>) -> Self {
        ScalarField::Radial(profile)
    }

    pub fn scaled(inner: ScalarField<T>, tau: T) -> Result<Self> {
        if !(tau > T::zero() && tau < T::one()) {
            return Err(Error::InvalidParams(format!("scaling needs tau in (0,1), got {tau}")));
        }
        Ok(ScalarField::Scaled {
            inner: Box::new(inner),
            tau,
        })
    }

    pub fn truncated(inner: ScalarField<T>, cap: T) -> Result<Self> {
        if !(cap > T::zero()) {
            return Err(Error::InvalidParams(format!("truncation needs k > 0, got {cap}")));
        }
        Ok(ScalarField::Truncated {
            inner: Box::new(inner),
            cap,
        })
    }

    /// Plateau height `(ln n)^{1/q}` of the `Moser` field.
    pub fn moser_plateau(n: u64, q: T) -> T {
        T::of_usize(n as usize).ln().powf(T::one() / q)
    }

    /// `a_n = e^{(ln n)^{1/q'}} / n` from the cross-term estimate.
    pub fn moser_a_n(n: u64, q: T) -> T {
        Self::moser_b_n(n, q) / T::of_usize(n as usize)
    }

    /// `b_n = e^{(ln n)^{1/q'}}`.
    pub fn moser_b_n(n: u64, q: T) -> T {
        let qp = q / (q - T::one());
        T::of_usize(n as usize).ln().powf(T::one() / qp).exp()
    }

    pub fn eval(&self, x: &Point<T>, dim: usize) -> Result<T> {
        match self {
            ScalarField::Constant(c) => Ok(*c),
            ScalarField::Linear { gradient, offset } => {
                let mut v = *offset;
                for i in 0..dim {
                    v += gradient[i] * x[i];
                }
                Ok(v)
            }
            ScalarField::Indicator { region, height } => {
                Ok(if region.contains(x) { *height } else { T::zero() })
            }
            ScalarField::LogLog { lambda } => {
                let r = norm(x, dim);
                if r == T::zero() {
                    return Err(Error::SingularPoint);
                }
                if r > T::of(INV_E) * (T::one() + T::of(1e-12)) {
                    return Err(Error::OutsideDomain);
                }
                Ok(loglog_value(*lambda, r))
            }
            ScalarField::Moser { n, q } => {
                let r = norm(x, dim);
                if r > T::of(INV_E) * (T::one() + T::of(1e-12)) {
                    return Err(Error::OutsideDomain);
                }
                Ok(moser_value(*n, *q, r))
            }
            ScalarField::Radial(profile) => {
                let r = norm(x, dim);
                if r > profile.hi() * (T::one() + T::of(1e-12)) {
                    return Err(Error::OutsideDomain);
                }
                Ok(profile.eval(r.min(profile.hi())))
            }
            ScalarField::Grid(grid) => {
                for i in 0..grid.dim {
                    let slack = (grid.hi[i] - grid.lo[i]) * T::of(1e-12);
                    if x[i] < grid.lo[i] - slack || x[i] > grid.hi[i] + slack {
                        return Err(Error::OutsideDomain);
                    }
                }
                Ok(grid.eval(x))
            }
            ScalarField::Scaled { inner, tau } => {
                let mut y = *x;
                for c in y.iter_mut().take(dim) {
                    *c = *c * *tau;
                }
                inner.eval(&y, dim)
            }
            ScalarField::Truncated { inner, cap } => {
                Ok(inner.eval(x, dim)?.max(-*cap).min(*cap))
            }
            ScalarField::Reflected { inner } => {
                let r = norm(x, dim);
                if r <= T::one() {
                    return inner.eval(x, dim);
                }
                if r > T::of(1.5) * (T::one() + T::of(1e-12)) {
                    return Err(Error::OutsideDomain);
                }
                let s = (T::of(2.0) - r) / r;
                let mut y = *x;
                for c in y.iter_mut().take(dim) {
                    *c = *c * s;
                }
                inner.eval(&y, dim)
            }
        }
    }

    /// `eval` with errors mapped to NaN; for Monte Carlo inner loops where an
    /// invalid sample should poison the estimate rather than abort it.
    pub fn eval_nan(&self, x: &Point<T>, dim: usize) -> T {
        self.eval(x, dim).unwrap_or(T::nan())
    }

    /// Radial profile `g` on `[0, r_max]` when the field is radial about the
    /// origin and defined up to `r_max`.
    pub fn radial_profile(&self, r_max: T) -> Option<Profile<T>> {
        let slack = T::one() + T::of(1e-12);
        match self {
            ScalarField::Constant(c) => Some(Profile::constant(*c, T::zero(), r_max)),
            ScalarField::Linear { gradient, .. } => {
                gradient.iter().all(|g| *g == T::zero()).then(|| {
                    Profile::constant(self.eval(&[T::zero(); 3], 1).unwrap(), T::zero(), r_max)
                })
            }
            ScalarField::LogLog { lambda } => {
                if r_max > T::of(INV_E) * slack {
                    return None;
                }
                let lambda = *lambda;
                Some(Profile::new(
                    Arc::new(move |r| loglog_value(lambda, r)),
                    T::zero(),
                    r_max,
                    vec![],
                ))
            }
            ScalarField::Moser { n, q } => {
                if r_max > T::of(INV_E) * slack {
                    return None;
                }
                let (n, q) = (*n, *q);
                let brk = T::one() / T::of_usize(n as usize);
                Some(Profile::new(
                    Arc::new(move |r| moser_value(n, q, r)),
                    T::zero(),
                    r_max,
                    vec![brk],
                ))
            }
            ScalarField::Radial(profile) => {
                if r_max > profile.hi() * slack {
                    return None;
                }
                Some(profile.restrict(T::zero(), r_max.min(profile.hi())))
            }
            ScalarField::Indicator { region, height } => match region {
                Domain::Ball { center, radius, .. }
                    if center.iter().all(|c| *c == T::zero()) =>
                {
                    let (rho, h) = (*radius, *height);
                    Some(Profile::new(
                        Arc::new(move |r| if r < rho { h } else { T::zero() }),
                        T::zero(),
                        r_max,
                        vec![rho],
                    ))
                }
                _ => None,
            },
            ScalarField::Grid(_) => None,
            ScalarField::Scaled { inner, tau } => {
                let tau = *tau;
                let p = inner.radial_profile(tau * r_max)?;
                let f = p.func();
                let breaks = p.breaks().iter().map(|&b| b / tau).collect();
                Some(Profile::new(
                    Arc::new(move |r| f(r * tau)),
                    T::zero(),
                    r_max,
                    breaks,
                ))
            }
            ScalarField::Truncated { inner, cap } => {
                let p = inner.radial_profile(r_max)?;
                Some(clamp_profile(&p, *cap))
            }
            ScalarField::Reflected { inner } => {
                if r_max > T::of(1.5) * slack {
                    return None;
                }
                let p = inner.radial_profile(T::one())?;
                let f = p.func();
                let mut breaks: Vec<T> = p.breaks().to_vec();
                breaks.push(T::one());
                breaks.extend(p.breaks().iter().map(|&b| T::of(2.0) - b));
                Some(Profile::new(
                    Arc::new(move |r| {
                        if r <= T::one() {
                            f(r)
                        } else {
                            f(T::of(2.0) - r)
                        }
                    }),
                    T::zero(),
                    r_max,
                    breaks,
                ))
            }
        }
    }

    /// 1-D restriction `x -> u(x)` on `[a, b]` (d = 1), as a
    /// piecewise-monotone profile when the structure is known.
    pub fn line_profile(&self, a: T, b: T) -> Option<Profile<T>> {
        match self {
            ScalarField::Constant(c) => Some(Profile::constant(*c, a, b)),
            ScalarField::Linear { gradient, offset } => {
                let (g, o) = (gradient[0], *offset);
                Some(Profile::new(Arc::new(move |x| g * x + o), a, b, vec![]))
            }
            ScalarField::Indicator { region, height } => match region {
                Domain::Interval { a: ia, b: ib } => {
                    let (ia, ib, h) = (*ia, *ib, *height);
                    Some(Profile::new(
                        Arc::new(move |x| if x > ia && x < ib { h } else { T::zero() }),
                        a,
                        b,
                        vec![ia, ib],
                    ))
                }
                _ => self.mirror_line_profile(a, b),
            },
            ScalarField::Grid(grid) => {
                if grid.dim != 1 {
                    return None;
                }
                let g = grid.clone();
                let n = g.shape[0];
                let mut breaks = Vec::new();
                if n >= 2 {
                    let step = (g.hi[0] - g.lo[0]) / T::of_usize(n - 1);
                    for k in 1..n - 1 {
                        breaks.push(g.lo[0] + step * T::of_usize(k));
                    }
                    if g.interp == Interp::Nearest {
                        // jumps sit halfway between nodes
                        breaks = (0..n - 1)
                            .map(|k| g.lo[0] + step * (T::of_usize(k) + T::of(0.5)))
                            .collect();
                    }
                }
                Some(Profile::new(
                    Arc::new(move |x| g.eval(&[x, T::zero(), T::zero()])),
                    a,
                    b,
                    breaks,
                ))
            }
            ScalarField::Scaled { inner, tau } => {
                let tau = *tau;
                let p = inner.line_profile(tau * a, tau * b)?;
                let f = p.func();
                let breaks = p.breaks().iter().map(|&x| x / tau).collect();
                Some(Profile::new(Arc::new(move |x| f(x * tau)), a, b, breaks))
            }
            ScalarField::Truncated { inner, cap } => {
                let p = inner.line_profile(a, b)?;
                Some(clamp_profile(&p, *cap))
            }
            _ => self.mirror_line_profile(a, b),
        }
    }

    /// Radial field seen along the x-axis on `[a, b]`: `x -> g(|x|)`.
    fn mirror_line_profile(&self, a: T, b: T) -> Option<Profile<T>> {
        let r_max = a.abs().max(b.abs());
        let p = self.radial_profile(r_max)?;
        if a >= T::zero() {
            return Some(p.restrict(a, b));
        }
        let f = p.func();
        let mut breaks = vec![T::zero()];
        for &br in p.breaks() {
            breaks.push(br);
            breaks.push(-br);
        }
        Some(Profile::new(Arc::new(move |x| f(x.abs())), a, b, breaks))
    }

    /// Closed-form `int_O |grad u|^p` for fields with a known gradient.
    pub fn gradient_p_energy(&self, domain: &Domain<T>, p: T) -> Option<T> {
        match self {
            ScalarField::Constant(_) => Some(T::zero()),
            ScalarField::Linear { gradient, .. } => {
                let g = norm(gradient, domain.dim());
                Some(g.powf(p) * domain.measure())
            }
            _ => None,
        }
    }
}

fn loglog_value<T: Real>(lambda: T, r: T) -> T {
    let r = r.max(loglog_floor::<T>());
    (r.recip().ln()).ln() / lambda.ln()
}

fn moser_value<T: Real>(n: u64, q: T, r: T) -> T {
    let ln_n = T::of_usize(n as usize).ln();
    let inv_n = T::one() / T::of_usize(n as usize);
    if r <= inv_n {
        ln_n.powf(T::one() / q)
    } else {
        let qp = q / (q - T::one());
        r.recip().ln() / ln_n.powf(T::one() / qp)
    }
}

/// Clamp a profile to `[-cap, cap]`, adding the crossing radii as breaks so
/// the pieces stay monotone-or-constant.
fn clamp_profile<T: Real>(p: &Profile<T>, cap: T) -> Profile<T> {
    let mut breaks: Vec<T> = p.breaks().to_vec();
    for (lo, hi) in p.intervals_above(cap).into_iter().chain(p.intervals_below(-cap)) {
        breaks.push(lo);
        breaks.push(hi);
    }
    let f = p.func();
    Profile::new(
        Arc::new(move |r| f(r).max(-cap).min(cap)),
        p.lo(),
        p.hi(),
        breaks,
    )
}

/// Radial reflection extension from the unit ball to the 3/2 ball. The field
/// must be defined on the unit ball (apply an affine normalization first for
/// other balls).
pub fn reflect_extend<T: Real>(field: ScalarField<T>) -> ScalarField<T> {
    ScalarField::Reflected {
        inner: Box::new(field),
    }
}

/// Mean `u_O` to within `tol`: deterministic quadrature for radial and 1-D
/// fields, Monte Carlo with a batch standard error otherwise.
pub fn mean<T: Real>(field: &ScalarField<T>, domain: &Domain<T>, tol: T) -> Result<Estimate<T>> {
    mean_with(field, domain, tol, &SamplerConfig::default())
}

pub fn mean_with<T: Real>(
    field: &ScalarField<T>,
    domain: &Domain<T>,
    tol: T,
    cfg: &SamplerConfig,
) -> Result<Estimate<T>> {
    match domain {
        Domain::Interval { a, b } => {
            if let Some(p) = field.line_profile(*a, *b) {
                let (a, b) = (*a, *b);
                let (value, trace) = crate::quad::converge(
                    |t| {
                        integrate_graded(&|x| p.eval(x), a, b, &QuadOptions::with_tol(t))
                            .map(|v| v / (b - a))
                    },
                    tol,
                    3,
                )?;
                return Ok(Estimate::deterministic(value, Method::Exact1d, trace));
            }
        }
        Domain::Ball { center, radius, dim }
            if center.iter().all(|c| *c == T::zero()) =>
        {
            if let Some(p) = field.radial_profile(*radius) {
                let (d, rr) = (*dim, *radius);
                let df = T::of_usize(d);
                let (value, trace) = crate::quad::converge(
                    |t| {
                        integrate_graded(
                            &|r: T| p.eval(r) * r.powi(d as i32 - 1),
                            T::zero(),
                            rr,
                            &QuadOptions::with_tol(t),
                        )
                        .map(|v| v * df / rr.powi(d as i32))
                    },
                    tol,
                    3,
                )?;
                return Ok(Estimate::deterministic(value, Method::Radial, trace));
            }
        }
        _ => {}
    }
    // Monte Carlo fallback
    let dim = domain.dim();
    let stats = run_batches(cfg, |_, seed| {
        let mut sampler = UniformSampler::new(domain, seed);
        let mut acc = T::zero();
        for _ in 0..cfg.batch_size {
            acc += field.eval_nan(&sampler.next_point(), dim);
        }
        acc / T::of_usize(cfg.batch_size)
    });
    if !stats.mean.is_finite() || stats.stderr > tol.max(T::of(1e-3)) {
        return Err(Error::NoConvergence {
            value: stats.mean.as_f64(),
            change: stats.stderr.as_f64(),
        });
    }
    Ok(Estimate::monte_carlo(stats.mean, stats.stderr, stats.trace))
}

/// Measure of `{x in domain : |u(x)| > t}` (strict inequality). Exact by
/// profile inversion for radial and 1-D fields, Monte Carlo otherwise.
pub fn superlevel_measure<T: Real>(
    field: &ScalarField<T>,
    domain: &Domain<T>,
    t: T,
) -> Result<Estimate<T>> {
    superlevel_measure_centered(field, domain, T::zero(), t, &SamplerConfig::default())
}

/// Measure of `{x in domain : |u(x) - center| > t}`.
pub fn superlevel_measure_centered<T: Real>(
    field: &ScalarField<T>,
    domain: &Domain<T>,
    center: T,
    t: T,
    cfg: &SamplerConfig,
) -> Result<Estimate<T>> {
    match domain {
        Domain::Interval { a, b } => {
            if let Some(p) = field.line_profile(*a, *b) {
                let v = total_length(&p.intervals_abs_above(center, t));
                return Ok(Estimate::exact(v, Method::ClosedForm));
            }
        }
        Domain::Ball { center: c0, radius, dim }
            if c0.iter().all(|c| *c == T::zero()) =>
        {
            if let Some(p) = field.radial_profile(*radius) {
                let omega = unit_ball_volume::<T>(*dim);
                let d = *dim as i32;
                let v: T = p
                    .intervals_abs_above(center, t)
                    .iter()
                    .map(|&(lo, hi)| omega * (hi.powi(d) - lo.powi(d)))
                    .sum();
                return Ok(Estimate::exact(v, Method::ClosedForm));
            }
        }
        _ => {}
    }
    let dim = domain.dim();
    let vol = domain.measure();
    let stats = run_batches(cfg, |_, seed| {
        let mut sampler = UniformSampler::new(domain, seed);
        let mut hits = 0usize;
        for _ in 0..cfg.batch_size {
            let u = field.eval_nan(&sampler.next_point(), dim);
            if (u - center).abs() > t {
                hits += 1;
            }
        }
        T::of_usize(hits) / T::of_usize(cfg.batch_size)
    });
    Ok(Estimate::monte_carlo(
        stats.mean * vol,
        stats.stderr * vol,
        stats.trace,
    ))
}
