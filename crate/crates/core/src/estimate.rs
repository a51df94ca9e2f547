//! Numeric results carry their method tag, error estimate, and refinement
//! trace.

use serde::Serialize;

use crate::real::Real;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact1d,
    Radial,
    Montecarlo,
    ClosedForm,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Exact1d => "exact1d",
            Method::Radial => "radial",
            Method::Montecarlo => "montecarlo",
            Method::ClosedForm => "closed_form",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Estimate<T> {
    pub value: T,
    /// Standard error; zero for deterministic methods.
    pub stderr: T,
    pub method: Method,
    /// `(resolution, value)` pairs, monotone in resolution.
    pub trace: Vec<(u64, T)>,
}

impl<T: Real> Estimate<T> {
    pub fn deterministic(value: T, method: Method, trace: Vec<(u64, T)>) -> Self {
        Estimate {
            value,
            stderr: T::zero(),
            method,
            trace,
        }
    }

    pub fn exact(value: T, method: Method) -> Self {
        Self::deterministic(value, method, vec![])
    }

    pub fn monte_carlo(value: T, stderr: T, trace: Vec<(u64, T)>) -> Self {
        Estimate {
            value,
            stderr,
            method: Method::Montecarlo,
            trace,
        }
    }

    /// Combined k-sigma agreement test between two estimates.
    pub fn agrees_within(&self, other: &Estimate<T>, k: T) -> bool {
        let s = (self.stderr * self.stderr + other.stderr * other.stderr).sqrt();
        (self.value - other.value).abs() <= k * s
    }
}
