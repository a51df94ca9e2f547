//! Domains of integration: intervals, balls, and axis-aligned boxes in
//! dimension d <= 3, with exact measures and reproducible uniform samplers.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::real::Real;
use crate::special::unit_ball_volume;

pub const MAX_DIM: usize = 3;

/// A point in R^d, d <= 3. Coordinates beyond `dim` are zero.
pub type Point<T> = [T; MAX_DIM];

pub fn origin<T: Real>() -> Point<T> {
    [T::zero(); MAX_DIM]
}

pub fn norm<T: Real>(x: &Point<T>, dim: usize) -> T {
    if dim == 1 {
        // avoid squaring: |x| down to the denormal range matters for the
        // strongly concentrated radial fields
        return x[0].abs();
    }
    let mut s = T::zero();
    for &c in x.iter().take(dim) {
        s += c * c;
    }
    s.sqrt()
}

pub fn dist<T: Real>(x: &Point<T>, y: &Point<T>, dim: usize) -> T {
    let mut s = T::zero();
    for i in 0..dim {
        let d = x[i] - y[i];
        s += d * d;
    }
    s.sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub enum Domain<T> {
    Interval { a: T, b: T },
    Ball { center: Point<T>, radius: T, dim: usize },
    Box { lo: Point<T>, hi: Point<T>, dim: usize },
}

impl<T: Real> Domain<T> {
    pub fn interval(a: T, b: T) -> Result<Self> {
        if !(b > a) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidDomain(format!("interval needs b > a, got [{a}, {b}]")));
        }
        Ok(Domain::Interval { a, b })
    }

    pub fn ball(center: Point<T>, radius: T, dim: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidDomain(format!("dimension {dim} out of range 1..=3")));
        }
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(Error::InvalidDomain(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Domain::Ball { center, radius, dim })
    }

    /// Ball centered at the origin.
    pub fn ball0(radius: T, dim: usize) -> Result<Self> {
        Self::ball(origin(), radius, dim)
    }

    pub fn cuboid(lo: Point<T>, hi: Point<T>, dim: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidDomain(format!("dimension {dim} out of range 1..=3")));
        }
        for i in 0..dim {
            if !(hi[i] > lo[i]) {
                return Err(Error::InvalidDomain(format!(
                    "box needs hi > lo componentwise, got lo[{i}]={}, hi[{i}]={}",
                    lo[i], hi[i]
                )));
            }
        }
        Ok(Domain::Box { lo, hi, dim })
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Interval { .. } => 1,
            Domain::Ball { dim, .. } | Domain::Box { dim, .. } => *dim,
        }
    }

    /// Exact closed-form Lebesgue measure.
    pub fn measure(&self) -> T {
        match self {
            Domain::Interval { a, b } => *b - *a,
            Domain::Ball { radius, dim, .. } => {
                unit_ball_volume::<T>(*dim) * radius.powi(*dim as i32)
            }
            Domain::Box { lo, hi, dim } => {
                let mut v = T::one();
                for i in 0..*dim {
                    v *= hi[i] - lo[i];
                }
                v
            }
        }
    }

    pub fn contains(&self, x: &Point<T>) -> bool {
        match self {
            Domain::Interval { a, b } => x[0] > *a && x[0] < *b,
            Domain::Ball { center, radius, dim } => dist(x, center, *dim) < *radius,
            Domain::Box { lo, hi, dim } => (0..*dim).all(|i| x[i] > lo[i] && x[i] < hi[i]),
        }
    }

    /// Axis-aligned bounding box `(lo, hi)`.
    pub fn bounding_box(&self) -> (Point<T>, Point<T>) {
        match self {
            Domain::Interval { a, b } => {
                let mut lo = origin();
                let mut hi = origin();
                lo[0] = *a;
                hi[0] = *b;
                (lo, hi)
            }
            Domain::Ball { center, radius, dim } => {
                let mut lo = origin();
                let mut hi = origin();
                for i in 0..*dim {
                    lo[i] = center[i] - *radius;
                    hi[i] = center[i] + *radius;
                }
                (lo, hi)
            }
            Domain::Box { lo, hi, .. } => (*lo, *hi),
        }
    }
}

/// Reproducibility contract: identical seed and config give identical sample
/// streams.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct SamplerConfig {
    pub seed: u64,
    pub batch_size: usize,
    pub max_batches: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            seed: 0x5eed_0001,
            batch_size: 4096,
            max_batches: 64,
        }
    }
}

impl SamplerConfig {
    pub fn with_seed(seed: u64) -> Self {
        SamplerConfig { seed, ..Default::default() }
    }

    pub fn total_samples(&self) -> usize {
        self.batch_size * self.max_batches
    }
}

/// splitmix64 step; used to derive independent per-batch child seeds so that
/// parallel batches are reproducible regardless of scheduling order.
pub fn child_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(0x2545_f491_4f6c_dd1d);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform sampler over a domain. Ball sampling is by rejection from the
/// bounding box, which is exactly uniform (acceptance >= pi/4 in d=2,
/// >= pi/6 in d=3).
pub struct UniformSampler<'a, T> {
    domain: &'a Domain<T>,
    rng: ChaCha8Rng,
}

impl<'a, T: Real> UniformSampler<'a, T> {
    pub fn new(domain: &'a Domain<T>, seed: u64) -> Self {
        UniformSampler {
            domain,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn next_point(&mut self) -> Point<T> {
        let dim = self.domain.dim();
        let (lo, hi) = self.domain.bounding_box();
        loop {
            let mut x = origin();
            for i in 0..dim {
                x[i] = self.rng.gen_range(lo[i]..hi[i]);
            }
            match self.domain {
                Domain::Ball { .. } => {
                    if self.domain.contains(&x) {
                        return x;
                    }
                }
                _ => return x,
            }
        }
    }

    pub fn next_pair(&mut self) -> (Point<T>, Point<T>) {
        let x = self.next_point();
        let y = self.next_point();
        (x, y)
    }
}

/// Uniform direction on S^{d-1}.
pub fn sample_direction<T: Real, R: Rng>(dim: usize, rng: &mut R) -> Point<T> {
    let mut w = origin();
    match dim {
        1 => {
            w[0] = if rng.gen::<bool>() { T::one() } else { -T::one() };
        }
        2 => {
            let theta = rng.gen_range(T::zero()..T::of(2.0 * std::f64::consts::PI));
            w[0] = theta.cos();
            w[1] = theta.sin();
        }
        3 => {
            // z uniform in [-1,1], azimuth uniform
            let z = rng.gen_range(-T::one()..T::one());
            let phi = rng.gen_range(T::zero()..T::of(2.0 * std::f64::consts::PI));
            let s = (T::one() - z * z).max(T::zero()).sqrt();
            w[0] = s * phi.cos();
            w[1] = s * phi.sin();
            w[2] = z;
        }
        _ => panic!("dimension {dim} out of range"),
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn closed_form_measures() {
        assert_eq!(Domain::interval(0.0, 1.0).unwrap().measure(), 1.0);
        let b2 = Domain::ball0(1.0, 2).unwrap();
        assert!((b2.measure() - PI).abs() < 1e-14);
        let b1 = Domain::ball0(1.0 / std::f64::consts::E, 1).unwrap();
        assert!((b1.measure() - 2.0 / std::f64::consts::E).abs() < 1e-15);
        let bx = Domain::cuboid([0.0, 0.0, 0.0], [2.0, 3.0, 1.0], 2).unwrap();
        assert_eq!(bx.measure(), 6.0);
    }

    #[test]
    fn degenerate_domains_rejected() {
        assert!(Domain::interval(1.0, 1.0).is_err());
        assert!(Domain::ball0(0.0, 2).is_err());
        assert!(Domain::<f64>::ball0(1.0, 4).is_err());
        assert!(Domain::cuboid([0.0; 3], [1.0, 0.0, 1.0], 2).is_err());
    }

    #[test]
    fn interval_sampler_mean_is_half() {
        let dom = Domain::interval(0.0f64, 1.0).unwrap();
        let mut s = UniformSampler::new(&dom, 42);
        let n = 10_000;
        let mean: f64 = (0..n).map(|_| s.next_point()[0]).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn ball_sampler_radius_fraction() {
        let dom = Domain::ball0(1.0f64, 2).unwrap();
        let mut s = UniformSampler::new(&dom, 7);
        let n = 10_000;
        let inside = (0..n)
            .filter(|_| norm(&s.next_point(), 2) <= 0.5)
            .count();
        let frac = inside as f64 / n as f64;
        assert!((frac - 0.25).abs() < 0.02, "fraction {frac}");
    }

    #[test]
    fn same_seed_same_stream() {
        let dom = Domain::ball0(1.0f64, 3).unwrap();
        let mut a = UniformSampler::new(&dom, 99);
        let mut b = UniformSampler::new(&dom, 99);
        for _ in 0..100 {
            assert_eq!(a.next_pair(), b.next_pair());
        }
    }

    #[test]
    fn pair_distance_oracle() {
        // E|x - y| on the unit interval = 1/3 by direct integration:
        // int_0^1 int_0^1 |x-y| dx dy = 2 int_0^1 int_0^x (x-y) dy dx = 1/3.
        let dom = Domain::interval(0.0f64, 1.0).unwrap();
        let mut s = UniformSampler::new(&dom, 11);
        let n = 10_000;
        let mean: f64 = (0..n)
            .map(|_| {
                let (x, y) = s.next_pair();
                (x[0] - y[0]).abs()
            })
            .sum::<f64>()
            / n as f64;
        assert!((mean - 1.0 / 3.0).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn ball_pairs_stay_inside() {
        let dom = Domain::ball0(1.0f64, 1).unwrap();
        let mut s = UniformSampler::new(&dom, 5);
        for _ in 0..1000 {
            let (x, y) = s.next_pair();
            assert!(x[0].abs() < 1.0 && y[0].abs() < 1.0);
        }
    }

    #[test]
    fn chi_square_sanity_on_bins() {
        // 10 equal bins at N = 1e5; chi-square statistic under uniformity has
        // 9 dof; 27.9 is the 99.9% quantile.
        let dom = Domain::interval(0.0f64, 1.0).unwrap();
        let mut s = UniformSampler::new(&dom, 123);
        let n = 100_000usize;
        let mut counts = [0usize; 10];
        for _ in 0..n {
            let x = s.next_point()[0];
            counts[((x * 10.0) as usize).min(9)] += 1;
        }
        let expected = n as f64 / 10.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        assert!(chi2 < 27.9, "chi2 {chi2}");
    }

    #[test]
    fn child_seeds_are_distinct() {
        let seeds: std::collections::HashSet<u64> = (0..1000).map(|i| child_seed(7, i)).collect();
        assert_eq!(seeds.len(), 1000);
    }
}
