//! Implementations of the four subcommands.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use nonloc_core::estimate::Method;
use nonloc_core::fields::ScalarField;
use nonloc_core::functional::{
    bbm_functional, i_delta_auto, raw_level_integral, sphere_constant, MollifierSpec,
    NonlocalParams,
};
use nonloc_core::report::{Status, VerificationReport};
use nonloc_core::verifiers::{self, VerifyOptions};
use nonloc_core::{Estimate, EstimateF, SamplerConfig};

use crate::artifacts::{csv_string, estimate_json, parse_csv, svg_plot, SweepRow};
use crate::error::{CliError, Result};
use crate::spec::{DomainSpec, FieldSpec};

pub const DEFAULT_SEED: u64 = 0x5eed_0001;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Functional {
    /// Normalizing sphere constant K_{d,p} (closed form).
    Kdp,
    /// Level-set functional I_{delta,p}(u, O).
    Idelta,
    /// Raw level integral J_delta = I_{delta,p} / delta^p.
    Jdelta,
    /// Mollified difference-quotient functional whose concentration limit
    /// recovers the gradient energy.
    Bbm,
}

impl FromStr for Functional {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kdp" => Ok(Functional::Kdp),
            "idelta" => Ok(Functional::Idelta),
            "jdelta" => Ok(Functional::Jdelta),
            "bbm" => Ok(Functional::Bbm),
            other => Err(CliError::Config(format!(
                "unknown functional '{other}' (known: kdp, idelta, jdelta, bbm)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepParam {
    /// Level threshold delta.
    Delta,
    /// Plateau index n of the critical-regime profile family.
    N,
    /// Dilation factor tau (evaluates the field x -> u(tau x)).
    Tau,
    /// Growth base lambda of the doubly logarithmic profile.
    Lambda,
}

impl FromStr for SweepParam {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "delta" => Ok(SweepParam::Delta),
            "n" => Ok(SweepParam::N),
            "tau" => Ok(SweepParam::Tau),
            "lambda" => Ok(SweepParam::Lambda),
            other => Err(CliError::Config(format!(
                "unknown sweep parameter '{other}' (known: delta, n, tau, lambda)"
            ))),
        }
    }
}

/// Fully resolved inputs for one functional evaluation.
pub struct ComputeSetup {
    pub functional: Functional,
    pub field: FieldSpec,
    pub domain: DomainSpec,
    pub d: usize,
    pub p: f64,
    pub delta: f64,
    pub seed: u64,
    pub tol: f64,
    pub samples: usize,
    pub mollifier_n: u64,
}

impl ComputeSetup {
    fn sampler(&self) -> SamplerConfig {
        SamplerConfig {
            seed: self.seed,
            batch_size: 4096,
            max_batches: (self.samples / 4096).max(2),
        }
    }

    pub fn evaluate(&self, swept: Option<(SweepParam, f64)>) -> Result<EstimateF> {
        let mut delta = self.delta;
        let mut field_spec = self.field.clone();
        let mut tau = None;
        match swept {
            None => {}
            Some((SweepParam::Delta, v)) => delta = v,
            Some((SweepParam::Tau, v)) => tau = Some(v),
            Some((SweepParam::N, v)) => {
                let FieldSpec::Moser { q, .. } = field_spec else {
                    return Err(CliError::Config(
                        "sweeping n requires --field moser".into(),
                    ));
                };
                field_spec = FieldSpec::Moser { n: v as u64, q };
            }
            Some((SweepParam::Lambda, v)) => {
                let FieldSpec::Loglog { .. } = field_spec else {
                    return Err(CliError::Config(
                        "sweeping lambda requires --field loglog".into(),
                    ));
                };
                field_spec = FieldSpec::Loglog { lambda: v };
            }
        }
        if let Functional::Kdp = self.functional {
            let v = sphere_constant(self.d, self.p)?;
            return Ok(Estimate::exact(v, Method::ClosedForm));
        }
        let mut field = field_spec.build(self.d, delta)?;
        if let Some(t) = tau {
            field = ScalarField::scaled(field, t)?;
        }
        let domain = self.domain.build(self.d)?;
        let params = NonlocalParams::new(self.d, self.p, delta)?;
        let cfg = self.sampler();
        Ok(match self.functional {
            Functional::Kdp => unreachable!("handled above"),
            Functional::Idelta => i_delta_auto(&field, &domain, &params, self.tol, &cfg)?,
            Functional::Jdelta => raw_level_integral(&field, &domain, &params, self.tol, &cfg)?,
            Functional::Bbm => bbm_functional(
                &field,
                &domain,
                self.p,
                &MollifierSpec::RescaledIndicator { n: self.mollifier_n },
                &cfg,
            )?,
        })
    }
}

fn write_artifact(out: Option<&Path>, name: &str, content: &str) -> Result<Option<PathBuf>> {
    let Some(dir) = out else { return Ok(None) };
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, content)?;
    Ok(Some(path))
}

/// `compute`: evaluate one functional, print the JSON record to stdout,
/// optionally also write it to `OUT/compute.json`.
pub fn compute(setup: &ComputeSetup, out: Option<&Path>) -> Result<()> {
    let est = setup.evaluate(None)?;
    let json = estimate_json(&est);
    print!("{json}");
    write_artifact(out, "compute.json", &json)?;
    Ok(())
}

/// `verify`: run one verification suite, print the text report, write JSON +
/// text artifacts, and exit 0 / 4 / 5 for holds / fails / inconclusive.
pub fn verify(id: &str, opt: &VerifyOptions, out: Option<&Path>) -> Result<u8> {
    if !verifiers::VERIFIER_IDS.contains(&id) {
        return Err(CliError::Config(format!(
            "unknown verifier '{id}' (known: {})",
            verifiers::VERIFIER_IDS.join(", ")
        )));
    }
    let report = verifiers::run(id, opt)?;
    print!("{}", report.render_text());
    write_artifact(out, &format!("{id}.json"), &report.to_json())?;
    write_artifact(out, &format!("{id}.txt"), &report.render_text())?;
    Ok(status_exit(report.status))
}

pub fn status_exit(status: Status) -> u8 {
    match status {
        Status::Holds => 0,
        Status::Fails => 4,
        Status::Inconclusive => 5,
    }
}

/// `sweep`: evaluate the functional along a one-parameter grid; CSV to
/// stdout and `OUT/sweep.csv`, line plot to `OUT/sweep.svg`.
pub fn sweep(
    setup: &ComputeSetup,
    param: SweepParam,
    values: &[f64],
    out: &Path,
    logx: bool,
    logy: bool,
) -> Result<()> {
    let rows: Vec<SweepRow> = values
        .iter()
        .map(|&v| {
            let est = setup.evaluate(Some((param, v)))?;
            Ok(SweepRow {
                param: v,
                value: est.value,
                stderr: est.stderr,
                method: est.method.as_str().to_string(),
            })
        })
        .collect::<Result<_>>()?;
    let csv = csv_string(&rows);
    print!("{csv}");
    write_artifact(Some(out), "sweep.csv", &csv)?;
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.param, r.value)).collect();
    let svg = svg_plot("param", "value", &pts, logx, logy)?;
    write_artifact(Some(out), "sweep.svg", &svg)?;
    Ok(())
}

/// `report`: re-render an existing artifact. A `.json` verification report
/// is printed as text (exit code tracks its recorded status); a sweep `.csv`
/// is re-plotted to `<stem>.svg`, byte-identical to the original plot.
pub fn report(input: &Path, out: Option<&Path>, logx: bool, logy: bool) -> Result<u8> {
    let text = std::fs::read_to_string(input)?;
    match input.extension().and_then(|e| e.to_str()) {
        Some("json") => {
            let report: VerificationReport = serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("not a verification report: {e}")))?;
            print!("{}", report.render_text());
            Ok(status_exit(report.status))
        }
        Some("csv") => {
            let rows = parse_csv(&text)?;
            let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.param, r.value)).collect();
            let svg = svg_plot("param", "value", &pts, logx, logy)?;
            let stem = input
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("sweep");
            let dir = match out {
                Some(d) => d.to_path_buf(),
                None => input.parent().unwrap_or(Path::new(".")).to_path_buf(),
            };
            std::fs::create_dir_all(&dir)?;
            let path = dir.join(format!("{stem}.svg"));
            std::fs::write(&path, &svg)?;
            println!("{}", path.display());
            Ok(0)
        }
        _ => Err(CliError::Config(
            "report input must be a .json report or a sweep .csv".into(),
        )),
    }
}
