//! Piecewise-monotone 1-D profiles and their level sets.
//!
//! A [`Profile`] is an evaluable function on `[lo, hi]` together with
//! breakpoints splitting it into monotone (or constant) pieces. Level-set
//! boundaries are located by bisection on the monotone pieces, which is what
//! makes the deterministic evaluators of the nonlocal functional possible.

use std::sync::Arc;

use crate::real::Real;

// Enough iterations to resolve a crossing anywhere in the f64 range even
// when one bracket end is 0 (linear halving reaches denormals in ~1100
// steps); the loop exits early once the bracket stops shrinking.
const BISECT_ITERS: usize = 2200;

pub type ProfileFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

#[derive(Clone)]
pub struct Profile<T> {
    f: ProfileFn<T>,
    lo: T,
    hi: T,
    /// Interior breakpoints, sorted, strictly inside `(lo, hi)`.
    breaks: Vec<T>,
}

impl<T: Real> Profile<T> {
    pub fn new(f: ProfileFn<T>, lo: T, hi: T, mut breaks: Vec<T>) -> Self {
        breaks.retain(|&b| b > lo && b < hi);
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup();
        Profile { f, lo, hi, breaks }
    }

    pub fn constant(value: T, lo: T, hi: T) -> Self {
        Profile::new(Arc::new(move |_| value), lo, hi, vec![])
    }

    pub fn lo(&self) -> T {
        self.lo
    }

    pub fn hi(&self) -> T {
        self.hi
    }

    pub fn breaks(&self) -> &[T] {
        &self.breaks
    }

    pub fn eval(&self, r: T) -> T {
        (self.f)(r)
    }

    pub fn func(&self) -> ProfileFn<T> {
        self.f.clone()
    }

    /// Piece boundaries including the endpoints.
    pub fn knots(&self) -> Vec<T> {
        let mut k = Vec::with_capacity(self.breaks.len() + 2);
        k.push(self.lo);
        k.extend_from_slice(&self.breaks);
        k.push(self.hi);
        k
    }

    /// Same profile restricted to `[lo, hi]` (must be inside the original
    /// support).
    pub fn restrict(&self, lo: T, hi: T) -> Profile<T> {
        Profile::new(self.f.clone(), lo, hi, self.breaks.clone())
    }

    /// Pointwise transform; monotone pieces must be preserved by `g` (e.g.
    /// affine maps, clamping).
    pub fn map(&self, g: impl Fn(T) -> T + Send + Sync + 'static) -> Profile<T> {
        let f = self.f.clone();
        Profile::new(
            Arc::new(move |r| g(f(r))),
            self.lo,
            self.hi,
            self.breaks.clone(),
        )
    }

    /// `{ r : f(r) > c }` as a union of disjoint intervals.
    pub fn intervals_above(&self, c: T) -> Vec<(T, T)> {
        self.level_intervals(c, true)
    }

    /// `{ r : f(r) < c }`.
    pub fn intervals_below(&self, c: T) -> Vec<(T, T)> {
        self.level_intervals(c, false)
    }

    /// `{ r : |f(r) - center| > t }` with `t >= 0`.
    pub fn intervals_abs_above(&self, center: T, t: T) -> Vec<(T, T)> {
        let mut out = self.intervals_above(center + t);
        out.extend(self.intervals_below(center - t));
        merge_intervals(&mut out);
        out
    }

    /// Supremum of `|f - center|`; pieces are monotone so the extrema sit at
    /// the knots.
    pub fn sup_abs(&self, center: T) -> T {
        self.knots()
            .iter()
            .map(|&r| (self.eval(r) - center).abs())
            .fold(T::zero(), T::max)
    }

    fn level_intervals(&self, c: T, above: bool) -> Vec<(T, T)> {
        let side = |v: T| if above { v > c } else { v < c };
        let knots = self.knots();
        let mut out: Vec<(T, T)> = Vec::new();
        for w in knots.windows(2) {
            let (a, b) = (w[0], w[1]);
            if !(b > a) {
                continue;
            }
            let (fa, fb) = (self.eval(a), self.eval(b));
            match (side(fa), side(fb)) {
                (true, true) => out.push((a, b)),
                (false, false) => {}
                (true, false) => {
                    let x = bisect(&*self.f, a, b, c, above);
                    out.push((a, x));
                }
                (false, true) => {
                    let x = bisect(&*self.f, b, a, c, above);
                    out.push((x, b));
                }
            }
        }
        merge_intervals(&mut out);
        out
    }
}

/// Bisection for the crossing of `f` with level `c` on a monotone piece.
/// `inside` is the endpoint on the selected side of the level set.
fn bisect<T: Real>(f: &dyn Fn(T) -> T, inside: T, outside: T, c: T, above: bool) -> T {
    let side = |v: T| if above { v > c } else { v < c };
    let mut x_in = inside;
    let mut x_out = outside;
    for _ in 0..BISECT_ITERS {
        let mid = (x_in + x_out) * T::of(0.5);
        if mid == x_in || mid == x_out {
            break;
        }
        if side(f(mid)) {
            x_in = mid;
        } else {
            x_out = mid;
        }
    }
    (x_in + x_out) * T::of(0.5)
}

fn merge_intervals<T: Real>(v: &mut Vec<(T, T)>) {
    v.retain(|&(a, b)| b > a);
    v.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let mut merged: Vec<(T, T)> = Vec::with_capacity(v.len());
    for &(a, b) in v.iter() {
        match merged.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => merged.push((a, b)),
        }
    }
    *v = merged;
}

/// Total length of a union of disjoint intervals.
pub fn total_length<T: Real>(intervals: &[(T, T)]) -> T {
    intervals.iter().map(|&(a, b)| b - a).sum()
}
