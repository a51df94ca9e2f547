//! Artifact serialization: JSON compute records, `param,value,stderr,method`
//! CSV tables, and self-contained SVG 1.1 line plots. All floating-point
//! output uses 17 significant digits, so re-reading a file and re-emitting
//! it reproduces the bytes exactly.

use std::fmt::Write as _;

use nonloc_core::EstimateF;

use crate::error::{CliError, Result};

/// 17 significant digits in scientific notation; round-trips every `f64`.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// JSON record for a single computed quantity.
pub fn estimate_json(est: &EstimateF) -> String {
    let mut s = String::from("{\n");
    let _ = writeln!(s, "  \"value\": {},", fmt17(est.value));
    let _ = writeln!(s, "  \"stderr\": {},", fmt17(est.stderr));
    let _ = writeln!(s, "  \"method\": \"{}\",", est.method.as_str());
    let trace: Vec<String> = est
        .trace
        .iter()
        .map(|(n, v)| format!("[{n}, {}]", fmt17(*v)))
        .collect();
    let _ = writeln!(s, "  \"trace\": [{}]", trace.join(", "));
    s.push_str("}\n");
    s
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub param: f64,
    pub value: f64,
    pub stderr: f64,
    pub method: String,
}

pub const CSV_HEADER: &str = "param,value,stderr,method";

pub fn csv_string(rows: &[SweepRow]) -> String {
    let mut s = String::with_capacity(64 * (rows.len() + 1));
    s.push_str(CSV_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            fmt17(r.param),
            fmt17(r.value),
            fmt17(r.stderr),
            r.method
        );
    }
    s
}

pub fn parse_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == CSV_HEADER => {}
        other => {
            return Err(CliError::Config(format!(
                "sweep CSV must start with '{CSV_HEADER}', got {other:?}"
            )))
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 4 {
            return Err(CliError::Config(format!(
                "sweep CSV line {}: expected 4 columns, got {}",
                i + 2,
                parts.len()
            )));
        }
        let num = |s: &str| {
            s.trim().parse::<f64>().map_err(|_| {
                CliError::Config(format!("sweep CSV line {}: bad number '{s}'", i + 2))
            })
        };
        rows.push(SweepRow {
            param: num(parts[0])?,
            value: num(parts[1])?,
            stderr: num(parts[2])?,
            method: parts[3].trim().to_string(),
        });
    }
    if rows.is_empty() {
        return Err(CliError::Config("sweep CSV has no data rows".into()));
    }
    Ok(rows)
}

const W: f64 = 800.0;
const H: f64 = 600.0;
const ML: f64 = 70.0; // left margin
const MR: f64 = 30.0;
const MT: f64 = 40.0;
const MB: f64 = 60.0;

fn axis_transform(vals: &[f64], log: bool, label: &str) -> Result<Vec<f64>> {
    if log {
        vals.iter()
            .map(|&v| {
                if v > 0.0 {
                    Ok(v.ln())
                } else {
                    Err(CliError::Config(format!(
                        "log axis '{label}' requires positive data, got {v}"
                    )))
                }
            })
            .collect()
    } else {
        Ok(vals.to_vec())
    }
}

fn px(x: f64) -> String {
    format!("{x:.2}")
}

/// One polyline over the data, fixed 800x600 viewBox, axis labels from the
/// column names, optional natural-log axes.
pub fn svg_plot(
    xlabel: &str,
    ylabel: &str,
    points: &[(f64, f64)],
    logx: bool,
    logy: bool,
) -> Result<String> {
    if points.is_empty() {
        return Err(CliError::Config("nothing to plot".into()));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let tx = axis_transform(&xs, logx, xlabel)?;
    let ty = axis_transform(&ys, logy, ylabel)?;
    let span = |v: &[f64]| {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if lo == hi {
            (lo - 0.5, hi + 0.5)
        } else {
            (lo, hi)
        }
    };
    let (x0, x1) = span(&tx);
    let (y0, y1) = span(&ty);
    let map_x = |t: f64| ML + (t - x0) / (x1 - x0) * (W - ML - MR);
    let map_y = |t: f64| H - MB - (t - y0) / (y1 - y0) * (H - MT - MB);

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">"
    );
    let _ = writeln!(
        s,
        "  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" \
         fill=\"white\" stroke=\"black\"/>",
        px(ML),
        px(MT),
        px(W - ML - MR),
        px(H - MT - MB)
    );
    let name = |base: &str, log: bool| {
        if log {
            format!("ln({base})")
        } else {
            base.to_string()
        }
    };
    let _ = writeln!(
        s,
        "  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\" \
         font-family=\"monospace\" font-size=\"16\">{}</text>",
        px((ML + W - MR) / 2.0),
        px(H - 15.0),
        name(xlabel, logx)
    );
    let _ = writeln!(
        s,
        "  <text x=\"20\" y=\"{}\" text-anchor=\"middle\" \
         font-family=\"monospace\" font-size=\"16\" \
         transform=\"rotate(-90 20 {})\">{}</text>",
        px((MT + H - MB) / 2.0),
        px((MT + H - MB) / 2.0),
        name(ylabel, logy)
    );
    // corner tick labels in original (untransformed) units
    let (rx0, rx1) = span(&xs);
    let (ry0, ry1) = span(&ys);
    let tick = |v: f64| format!("{v:.3e}");
    let _ = writeln!(
        s,
        "  <text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\">{}</text>",
        px(ML),
        px(H - MB + 20.0),
        tick(rx0)
    );
    let _ = writeln!(
        s,
        "  <text x=\"{}\" y=\"{}\" text-anchor=\"end\" \
         font-family=\"monospace\" font-size=\"12\">{}</text>",
        px(W - MR),
        px(H - MB + 20.0),
        tick(rx1)
    );
    let _ = writeln!(
        s,
        "  <text x=\"{}\" y=\"{}\" text-anchor=\"end\" \
         font-family=\"monospace\" font-size=\"12\">{}</text>",
        px(ML - 6.0),
        px(H - MB),
        tick(ry0)
    );
    let _ = writeln!(
        s,
        "  <text x=\"{}\" y=\"{}\" text-anchor=\"end\" \
         font-family=\"monospace\" font-size=\"12\">{}</text>",
        px(ML - 6.0),
        px(MT + 12.0),
        tick(ry1)
    );
    let pts: Vec<String> = tx
        .iter()
        .zip(&ty)
        .map(|(&a, &b)| format!("{},{}", px(map_x(a)), px(map_y(b))))
        .collect();
    let _ = writeln!(
        s,
        "  <polyline fill=\"none\" stroke=\"#1f4e8c\" stroke-width=\"2\" points=\"{}\"/>",
        pts.join(" ")
    );
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt17_round_trips() {
        for &x in &[0.0, 0.81, std::f64::consts::PI, 1e-300, -2.5e17, f64::MIN_POSITIVE] {
            assert_eq!(fmt17(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn csv_round_trips_bytes() {
        let rows = vec![
            SweepRow { param: 0.1, value: 0.81, stderr: 0.0, method: "exact1d".into() },
            SweepRow { param: 0.2, value: 0.64, stderr: 1e-9, method: "montecarlo".into() },
        ];
        let text = csv_string(&rows);
        let parsed = parse_csv(&text).unwrap();
        assert_eq!(parsed, rows);
        assert_eq!(csv_string(&parsed), text);
    }

    #[test]
    fn svg_is_deterministic_and_rejects_bad_log_axis() {
        let pts = [(0.1, 1.0), (0.2, 0.5), (0.4, 0.25)];
        let a = svg_plot("delta", "value", &pts, true, true).unwrap();
        let b = svg_plot("delta", "value", &pts, true, true).unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.contains("<polyline"));
        assert!(svg_plot("x", "y", &[(0.0, 1.0)], true, false).is_err());
    }
}
