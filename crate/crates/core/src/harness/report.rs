use std::io::Write;
use std::path::Path;

use super::config::Detector;
use crate::Result;

pub const CSV_HEADER: &str = "param_name,param_value,detector,errors,trials,ser,seconds";

/// Counts for one (sweep point, detector) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub rho_db: f64,
    pub dither_dbm: f64,
    pub detector: Detector,
    pub errors: u64,
    pub trials: u64,
    /// Summed time spent on this row by all workers.
    pub seconds: f64,
}

impl SweepRow {
    pub fn ser(&self) -> f64 {
        self.errors as f64 / self.trials as f64
    }

    /// Normal-approximation 95% half-width of the SER estimate.
    pub fn ci_half_width(&self) -> f64 {
        let p = self.ser();
        1.96 * (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub seed: u64,
    pub config_hash: String,
    pub version: String,
    /// Whether the sweep varies SNR, dither power, or both.
    pub rho_varies: bool,
    pub dither_varies: bool,
}

impl SweepReport {
    pub fn empty(seed: u64) -> Self {
        Self {
            rows: Vec::new(),
            seed,
            config_hash: String::new(),
            version: crate::VERSION.into(),
            rho_varies: false,
            dither_varies: true,
        }
    }

    pub fn rows_for(&self, detector: Detector) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(move |r| r.detector == detector)
    }

    /// `(param_name, param_value)` for the CSV.
    ///
    /// One-dimensional sweeps name the varying axis. A full grid uses
    /// `dither_dbm@rho_db=<value>` so every row still carries one number.
    pub fn param_of(&self, row: &SweepRow) -> (String, f64) {
        match (self.rho_varies, self.dither_varies) {
            (true, false) => ("rho_db".into(), row.rho_db),
            (true, true) => (format!("dither_dbm@rho_db={}", fmt_sig(row.rho_db)), row.dither_dbm),
            _ => ("dither_dbm".into(), row.dither_dbm),
        }
    }

    /// CSV text; with `timing = false` the seconds column is left empty so
    /// reruns compare byte for byte.
    pub fn to_csv(&self, timing: bool) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let (name, value) = self.param_of(r);
            let secs = if timing { fmt_sig(r.seconds) } else { String::new() };
            out.push_str(&format!(
                "{name},{},{},{},{},{},{secs}\n",
                fmt_sig(value),
                r.detector.name(),
                r.errors,
                r.trials,
                fmt_sig(r.ser())
            ));
        }
        out
    }

    /// `key = value` metadata, written next to the CSV by the CLI.
    pub fn metadata(&self) -> String {
        format!(
            "seed = {}\nconfig_hash = {}\nversion = {}\n",
            self.seed, self.config_hash, self.version
        )
    }
}

pub fn write_csv(report: &SweepReport, path: &Path, timing: bool) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    f.write_all(report.to_csv(timing).as_bytes())?;
    f.flush()?;
    Ok(())
}

/// Formats with 9 significant digits, `%.9g` style.
pub fn fmt_sig(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{v:.8e}");
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        format!("{}e{}{:02}", trim_zeros(mant.to_string()), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}
