use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::channel::ChannelParams;
use crate::detect::{candidate_count, DEFAULT_MAX_CANDIDATES};
use crate::num::Constellation;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Detector {
    Ml,
    Blmmse,
    /// Uniform random decisions; a sanity floor for the SER pipeline.
    RandomGuess,
}

impl Detector {
    pub fn name(self) -> &'static str {
        match self {
            Detector::Ml => "ml",
            Detector::Blmmse => "blmmse",
            Detector::RandomGuess => "random",
        }
    }
}

impl FromStr for Detector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ml" => Ok(Detector::Ml),
            "blmmse" => Ok(Detector::Blmmse),
            "random" | "random-guess" => Ok(Detector::RandomGuess),
            other => Err(Error::Config(format!("unknown detector '{other}' (expected ml, blmmse, random)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n_tx: usize,
    pub n_rx: usize,
    pub n_streams: usize,
    pub rho_db: Vec<f64>,
    /// Dither power per antenna in dBm; `-inf` (or `off`) asks for no dither, see [`Self::dither_points`].
    pub dither_dbm: Vec<f64>,
    pub n_channels: usize,
    pub n_symbol_vectors: usize,
    pub seed: u64,
    pub detectors: Vec<Detector>,
    pub constellation: String,
    pub n_paths: usize,
    pub angular_spread: f64,
    pub output: Option<PathBuf>,
    /// Worker threads; results do not depend on this.
    pub workers: usize,
    pub max_candidates: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let ch = ChannelParams::new(128, 16);
        Self {
            n_tx: 128,
            n_rx: 16,
            n_streams: 1,
            rho_db: vec![5.0],
            dither_dbm: parse_list("-10:5:30").expect("default grid"),
            n_channels: 10,
            n_symbol_vectors: 1000,
            seed: 1,
            detectors: vec![Detector::Ml, Detector::Blmmse],
            constellation: "16qam".into(),
            n_paths: ch.n_paths,
            angular_spread: ch.angular_spread,
            output: None,
            workers: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            max_candidates: DEFAULT_MAX_CANDIDATES,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.rho_db.is_empty() || self.dither_dbm.is_empty() || self.detectors.is_empty() {
            return bad("rho_db, dither_dbm and detectors must be non-empty".into());
        }
        if self.n_channels == 0 || self.n_symbol_vectors == 0 {
            return bad("channels and symbols must be at least 1".into());
        }
        if self.n_streams == 0 || self.n_streams > self.n_tx.min(self.n_rx) {
            return bad(format!(
                "n_streams = {} must be in 1..=min(n_tx, n_rx) = {}",
                self.n_streams,
                self.n_tx.min(self.n_rx)
            ));
        }
        if self.workers == 0 {
            return bad("workers must be at least 1".into());
        }
        if let Some(r) = self.rho_db.iter().find(|r| !r.is_finite()) {
            return bad(format!("SNR {r} dB is not finite"));
        }
        if let Some(d) = self.dither_dbm.iter().find(|d| d.is_nan() || **d == f64::INFINITY) {
            return bad(format!("dither {d} dBm is not allowed"));
        }
        if !self.dither_dbm.iter().any(|d| d.is_finite()) {
            return bad("dither list needs at least one finite power".into());
        }
        if self.detectors.contains(&Detector::Ml) {
            let l = self.constellation()?.len();
            if candidate_count(l, self.n_streams).is_none_or(|c| c > self.max_candidates) {
                return bad(format!(
                    "{l}^{} ML candidates exceeds the table cap of {}",
                    self.n_streams, self.max_candidates
                ));
            }
        }
        self.constellation()?;
        self.channel_params().validate()
    }

    /// Dither grid with `off` replaced by the smallest finite grid value.
    ///
    /// The linearization needs a positive dither power, so "no dither" is
    /// approximated by the weakest dither the sweep already contains.
    pub fn dither_points(&self) -> Vec<f64> {
        let floor = self.dither_dbm.iter().copied().filter(|d| d.is_finite()).fold(f64::INFINITY, f64::min);
        self.dither_dbm.iter().map(|&d| if d.is_finite() { d } else { floor }).collect()
    }

    pub fn constellation(&self) -> Result<Constellation> {
        Constellation::by_name(&self.constellation)
    }

    pub fn channel_params(&self) -> ChannelParams {
        ChannelParams {
            n_paths: self.n_paths,
            angular_spread: self.angular_spread,
            ..ChannelParams::new(self.n_tx, self.n_rx)
        }
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key.trim() {
            "n_tx" | "n" => self.n_tx = parse_scalar(key, v)?,
            "n_rx" | "m" => self.n_rx = parse_scalar(key, v)?,
            "n_streams" | "k" => self.n_streams = parse_scalar(key, v)?,
            "rho_db" | "snr_db" => self.rho_db = parse_list(v)?,
            "dither_dbm" => self.dither_dbm = parse_list(v)?,
            "n_channels" | "channels" => self.n_channels = parse_scalar(key, v)?,
            "n_symbol_vectors" | "symbols" => self.n_symbol_vectors = parse_scalar(key, v)?,
            "seed" => self.seed = parse_scalar(key, v)?,
            "detectors" => {
                self.detectors = v.split(',').map(str::parse).collect::<Result<_>>()?;
            }
            "constellation" => self.constellation = v.to_string(),
            "n_paths" => self.n_paths = parse_scalar(key, v)?,
            "angular_spread" => self.angular_spread = parse_scalar(key, v)?,
            "output" | "out" => self.output = Some(PathBuf::from(v)),
            "workers" => self.workers = parse_scalar(key, v)?,
            "max_candidates" => self.max_candidates = parse_scalar(key, v)?,
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Reads a flat `key = value` file on top of the defaults.
    pub fn from_file(path: &Path) -> Result<Self> {
        let mut cfg = Self::default();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", no + 1)))?;
            self.set(k, v).map_err(|e| match e {
                Error::Config(m) => Error::Config(format!("line {}: {m}", no + 1)),
                other => other,
            })?;
        }
        Ok(())
    }

    /// Canonical text of every setting that affects the results.
    ///
    /// `output` and `workers` are left out: they cannot change a count.
    pub fn canonical(&self) -> String {
        let list = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",");
        let mut s = String::new();
        let _ = writeln!(s, "n_tx = {}", self.n_tx);
        let _ = writeln!(s, "n_rx = {}", self.n_rx);
        let _ = writeln!(s, "n_streams = {}", self.n_streams);
        let _ = writeln!(s, "rho_db = {}", list(&self.rho_db));
        let _ = writeln!(s, "dither_dbm = {}", list(&self.dither_dbm));
        let _ = writeln!(s, "n_channels = {}", self.n_channels);
        let _ = writeln!(s, "n_symbol_vectors = {}", self.n_symbol_vectors);
        let _ = writeln!(s, "seed = {}", self.seed);
        let det: Vec<_> = self.detectors.iter().map(|d| d.name()).collect();
        let _ = writeln!(s, "detectors = {}", det.join(","));
        let _ = writeln!(s, "constellation = {}", self.constellation);
        let _ = writeln!(s, "n_paths = {}", self.n_paths);
        let _ = writeln!(s, "angular_spread = {:?}", self.angular_spread);
        let _ = writeln!(s, "max_candidates = {}", self.max_candidates);
        s
    }

    /// SHA-256 of [`Self::canonical`], hex encoded.
    pub fn hash(&self) -> String {
        Sha256::digest(self.canonical().as_bytes())
            .iter()
            .fold(String::new(), |mut acc, b| {
                let _ = write!(acc, "{b:02x}");
                acc
            })
    }
}

fn parse_scalar<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Config(format!("bad value '{v}' for {key}")))
}

fn parse_value(v: &str) -> Result<f64> {
    match v.trim().to_ascii_lowercase().as_str() {
        "off" | "-inf" => Ok(f64::NEG_INFINITY),
        t => t.parse().map_err(|_| Error::Config(format!("bad number '{v}'"))),
    }
}

/// Parses `a,b,c` or an inclusive range `start:step:stop`.
pub fn parse_list(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [start, step, stop] => {
            let (a, h, b) = (parse_value(start)?, parse_value(step)?, parse_value(stop)?);
            if !(a.is_finite() && h.is_finite() && b.is_finite()) || h == 0.0 || (b - a) / h < 0.0 {
                return Err(Error::Config(format!("bad range '{text}'")));
            }
            let count = ((b - a) / h + 1e-9).floor() as usize + 1;
            if count > 100_000 {
                return Err(Error::Config(format!("range '{text}' has too many points")));
            }
            Ok((0..count).map(|i| a + i as f64 * h).collect())
        }
        [single] => {
            let out: Vec<f64> = single.split(',').filter(|t| !t.trim().is_empty()).map(parse_value).collect::<Result<_>>()?;
            if out.is_empty() {
                return Err(Error::Config("empty list".into()));
            }
            Ok(out)
        }
        _ => Err(Error::Config(format!("bad list '{text}'"))),
    }
}
