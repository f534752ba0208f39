use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::runner::TrialResult;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorizonSummary {
    #[serde(rename = "T")]
    pub horizon: u64,
    pub trials: usize,
    pub mean_regret: f64,
    /// Standard error of the mean; 0 for a single trial.
    pub se_regret: f64,
    pub min_regret: f64,
    pub max_regret: f64,
    pub min_profit: f64,
    pub gbb_violations: usize,
    pub gpb_mean: f64,
}

impl HorizonSummary {
    pub fn from_trials(trials: &[TrialResult]) -> Self {
        let n = trials.len();
        let regrets: Vec<f64> = trials.iter().map(|t| t.regret).collect();
        let mean = regrets.iter().sum::<f64>() / n as f64;
        let se = if n > 1 {
            let var = regrets.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        HorizonSummary {
            horizon: trials.first().map_or(0, |t| t.horizon),
            trials: n,
            mean_regret: mean,
            se_regret: se,
            min_regret: regrets.iter().copied().fold(f64::INFINITY, f64::min),
            max_regret: regrets.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            min_profit: trials.iter().map(|t| t.total_profit).fold(f64::INFINITY, f64::min),
            gbb_violations: trials.iter().filter(|t| !t.gbb_ok).count(),
            gpb_mean: trials.iter().map(|t| t.gpb_sum).sum::<f64>() / n as f64,
        }
    }
}

/// Least-squares fit of `ln(mean regret) = slope·ln(T) + intercept`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub horizons: Vec<u64>,
    /// Horizons left out because their mean regret was not positive.
    pub excluded: Vec<u64>,
}

/// OLS on `(ln x, ln y)`; needs at least 3 points with positive `y`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Option<(f64, f64, f64)> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|p| p.1 > 0.0 && p.0 > 0.0).map(|p| (p.0.ln(), p.1.ln())).collect();
    let n = pts.len();
    if n < 3 {
        return None;
    }
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let slope_se = (rss / (nf - 2.0) / sxx).sqrt();
    Some((slope, intercept, slope_se))
}

pub fn fit_scaling(rows: &[HorizonSummary]) -> Option<ScalingFit> {
    let (kept, dropped): (Vec<&HorizonSummary>, Vec<&HorizonSummary>) = rows.iter().partition(|r| r.mean_regret > 0.0);
    for r in &dropped {
        log::warn!("T={}: mean regret {} is not positive; excluded from the fit", r.horizon, r.mean_regret);
    }
    let pts: Vec<(f64, f64)> = kept.iter().map(|r| (r.horizon as f64, r.mean_regret)).collect();
    let (slope, intercept, slope_se) = fit_power_law(&pts)?;
    Some(ScalingFit {
        slope,
        intercept,
        slope_se,
        horizons: kept.iter().map(|r| r.horizon).collect(),
        excluded: dropped.iter().map(|r| r.horizon).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretReport {
    pub family: String,
    pub mechanism: String,
    pub rows: Vec<HorizonSummary>,
    pub fit: Option<ScalingFit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<Vec<Vec<TrialResult>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("unknown format '{other}' (csv or json)"))),
        }
    }
}

pub const CSV_HEADER: [&str; 14] = [
    "family",
    "mechanism",
    "T",
    "trials",
    "mean_regret",
    "se_regret",
    "min_regret",
    "max_regret",
    "min_profit",
    "gbb_violations",
    "gpb_mean",
    "slope",
    "intercept",
    "slope_se",
];

/// One row per horizon plus a trailing `fit` row; an empty report is header-only.
pub fn write_csv<W: std::io::Write>(report: &RegretReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in &report.rows {
        w.write_record([
            report.family.clone(),
            report.mechanism.clone(),
            r.horizon.to_string(),
            r.trials.to_string(),
            r.mean_regret.to_string(),
            r.se_regret.to_string(),
            r.min_regret.to_string(),
            r.max_regret.to_string(),
            r.min_profit.to_string(),
            r.gbb_violations.to_string(),
            r.gpb_mean.to_string(),
            String::new(),
            String::new(),
            String::new(),
        ])?;
    }
    if !report.rows.is_empty() {
        let (s, i, se) = match &report.fit {
            Some(f) => (f.slope.to_string(), f.intercept.to_string(), f.slope_se.to_string()),
            None => Default::default(),
        };
        let mut rec = vec![report.family.clone(), report.mechanism.clone(), "fit".to_string()];
        rec.extend(std::iter::repeat_n(String::new(), 8));
        rec.extend([s, i, se]);
        w.write_record(rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit(report: &RegretReport, path: &Path, format: Format) -> Result<()> {
    let file = std::fs::File::create(path)?;
    match format {
        Format::Csv => write_csv(report, file),
        Format::Json => {
            serde_json::to_writer_pretty(std::io::BufWriter::new(file), report)?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(t: u64, regret: f64) -> HorizonSummary {
        HorizonSummary {
            horizon: t,
            trials: 3,
            mean_regret: regret,
            se_regret: 0.5,
            min_regret: regret - 1.0,
            max_regret: regret + 1.0,
            min_profit: 0.0,
            gbb_violations: 0,
            gpb_mean: 1.0,
        }
    }

    #[test]
    fn synthetic_two_thirds() {
        let rows: Vec<HorizonSummary> = [1e3, 1e4, 1e5, 1e6].iter().map(|&t: &f64| row(t as u64, 3.0 * t.powf(2.0 / 3.0))).collect();
        let f = fit_scaling(&rows).unwrap();
        assert!((f.slope - 2.0 / 3.0).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-10);
        assert!(f.slope_se < 1e-10);
    }

    #[test]
    fn nonpositive_excluded() {
        let rows = vec![row(10, -1.0), row(100, 10.0), row(1000, 100.0), row(10_000, 1000.0)];
        let f = fit_scaling(&rows).unwrap();
        assert_eq!(f.excluded, vec![10]);
        assert!((f.slope - 1.0).abs() < 1e-12);
        assert!(fit_scaling(&rows[..3]).is_none());
    }

    #[test]
    fn csv_shapes() {
        let empty = RegretReport { family: "u".into(), mechanism: "m".into(), rows: vec![], fit: None, trials: None };
        let mut buf = vec![];
        write_csv(&empty, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1);
        assert_eq!(text.trim_end(), CSV_HEADER.join(","));

        let rows = vec![row(100, 10.0), row(1000, 50.0), row(10_000, 300.0)];
        let fit = fit_scaling(&rows);
        let rep = RegretReport { family: "u".into(), mechanism: "m".into(), rows, fit, trials: None };
        let mut buf = vec![];
        write_csv(&rep, &mut buf).unwrap();
        let mut rd = csv::Reader::from_reader(buf.as_slice());
        let recs: Vec<csv::StringRecord> = rd.records().map(|r| r.unwrap()).collect();
        assert_eq!(recs.len(), 4);
        assert_eq!(&recs[3][2], "fit");
        assert!(recs[3][11].parse::<f64>().is_ok());
        assert_eq!(&recs[0][11], "");
    }

    #[test]
    fn json_roundtrip() {
        let rows = vec![row(100, 10.0), row(1000, 50.0), row(10_000, 300.0)];
        let fit = fit_scaling(&rows);
        let rep = RegretReport { family: "u".into(), mechanism: "m".into(), rows, fit, trials: None };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        emit(&rep, &path, Format::Json).unwrap();
        let back: RegretReport = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(back, rep);
        assert!(emit(&rep, &dir.path().join("missing/r.csv"), Format::Csv).is_err());
    }
}
