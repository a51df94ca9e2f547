//! Verification suites for the quantitative statements, one module per
//! statement family. All verifiers are pinned to `f64` and return a
//! [`VerificationReport`](crate::report::VerificationReport).

pub mod bbm;
pub mod cascade;
pub mod counterexample_loglog;
pub mod counterexample_moser;
pub mod doubling;
pub mod expint;
pub mod poincare;
pub mod setlemma;
pub mod sobolev;

use crate::error::{Error, Result};
use crate::report::VerificationReport;

/// Shared knobs for a verifier run.
#[derive(Copy, Clone, Debug)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Multiplier on sample counts / grid sizes; 1.0 is the default budget.
    pub effort: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 0x5eed_0001,
            effort: 1.0,
        }
    }
}

pub const VERIFIER_IDS: &[&str] = &[
    "bbm",
    "doubling",
    "setlemma",
    "poincare",
    "sobolev",
    "cascade",
    "expint",
    "loglog",
    "moser",
];

/// Dispatch by statement id; unknown ids are a configuration error.
pub fn run(id: &str, opt: &VerifyOptions) -> Result<VerificationReport> {
    match id {
        "bbm" => bbm::verify(opt),
        "doubling" => doubling::verify(opt),
        "setlemma" => setlemma::verify(opt),
        "poincare" => poincare::verify(opt),
        "sobolev" => sobolev::verify(opt),
        "cascade" => cascade::verify(opt),
        "expint" => expint::verify(opt),
        "loglog" => counterexample_loglog::verify(opt),
        "moser" => counterexample_moser::verify(opt),
        other => Err(Error::InvalidParams(format!("unknown verifier id '{other}'"))),
    }
}
