//! Command-line front end for SER sweeps and the Monte-Carlo self-check.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use onebit_mimo::harness::{parse_list, run_sweep, write_csv, ExperimentConfig};
use onebit_mimo::oracle::validation::self_check;

#[derive(Parser, Debug)]
#[command(name = "onebit-sim", version, about = "1-bit DAC massive MIMO downlink SER simulator")]
struct Cli {
    /// Flat `key = value` config file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Transmit antennas.
    #[arg(long)]
    n: Option<usize>,
    /// Receive antennas.
    #[arg(long)]
    m: Option<usize>,
    /// Data streams.
    #[arg(long)]
    k: Option<usize>,
    /// SNR list in dB: `a,b,c` or `start:step:stop`.
    #[arg(long, allow_hyphen_values = true)]
    snr_db: Option<String>,
    /// Dither power list in dBm: `a,b,c` or `start:step:stop`; `off` maps to the smallest listed power.
    #[arg(long, allow_hyphen_values = true)]
    dither_dbm: Option<String>,
    #[arg(long)]
    channels: Option<usize>,
    /// Symbol vectors per channel.
    #[arg(long)]
    symbols: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma list from ml, blmmse, random.
    #[arg(long)]
    detectors: Option<String>,
    /// CSV destination; stdout when absent. Metadata goes to `<out>.meta`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run the closed-form vs Monte-Carlo validation suite instead of a sweep.
    #[arg(long)]
    self_check: bool,
    /// Random instances for --self-check.
    #[arg(long, default_value_t = 20)]
    self_check_instances: usize,
    /// Draws per instance for --self-check.
    #[arg(long, default_value_t = 1_000_000)]
    self_check_draws: usize,
    #[arg(long)]
    workers: Option<usize>,
    /// Leave the seconds column empty (for byte-wise comparison of reruns).
    #[arg(long)]
    no_timing: bool,
}

fn build_config(cli: &Cli) -> onebit_mimo::Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::from_file(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(v) = cli.n {
        cfg.n_tx = v;
    }
    if let Some(v) = cli.m {
        cfg.n_rx = v;
    }
    if let Some(v) = cli.k {
        cfg.n_streams = v;
    }
    if let Some(v) = &cli.snr_db {
        cfg.rho_db = parse_list(v)?;
    }
    if let Some(v) = &cli.dither_dbm {
        cfg.dither_dbm = parse_list(v)?;
    }
    if let Some(v) = cli.channels {
        cfg.n_channels = v;
    }
    if let Some(v) = cli.symbols {
        cfg.n_symbol_vectors = v;
    }
    if let Some(v) = cli.seed {
        cfg.seed = v;
    }
    if let Some(v) = &cli.detectors {
        cfg.set("detectors", v)?;
    }
    if let Some(v) = &cli.out {
        cfg.output = Some(v.clone());
    }
    if let Some(v) = cli.workers {
        cfg.workers = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> onebit_mimo::Result<bool> {
    let cfg = build_config(cli)?;
    if cli.self_check {
        let rep = self_check(cli.self_check_instances, cli.self_check_draws, cfg.seed)?;
        println!("{rep}");
        return Ok(rep.passed());
    }
    let report = run_sweep(&cfg)?;
    match &cfg.output {
        Some(path) => {
            write_csv(&report, path, !cli.no_timing)?;
            let mut meta = path.clone().into_os_string();
            meta.push(".meta");
            std::fs::write(meta, report.metadata())?;
            eprintln!("wrote {} rows to {}", report.rows.len(), path.display());
        }
        None => print!("{}", report.to_csv(!cli.no_timing)),
    }
    eprint!("{}", report.metadata());
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
