//! Scaled-down SER-versus-dither sweep, written as CSV.
//!
//! Usage: cargo run --release --example dither_sweep -- [config file] [out.csv]
//! Without a config file, uses `dither_sweep.conf` next to this example.

use onebit_mimo::harness::{run_sweep, write_csv, Detector, ExperimentConfig};

fn main() -> onebit_mimo::Result<()> {
    let mut args = std::env::args().skip(1);
    let cfg_path = args
        .next()
        .map(std::path::PathBuf::from)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/dither_sweep.conf").into());
    let out = args.next().unwrap_or_else(|| "dither_sweep.csv".into());

    let cfg = ExperimentConfig::from_file(&cfg_path)?;
    let t = std::time::Instant::now();
    let report = run_sweep(&cfg)?;
    write_csv(&report, out.as_ref(), true)?;

    println!("{:>10} {:>12} {:>12}", "dBm", "ML", "BLMMSE");
    for (ml, bl) in report.rows_for(Detector::Ml).zip(report.rows_for(Detector::Blmmse)) {
        println!("{:>10} {:>12.2e} {:>12.2e}", ml.dither_dbm, ml.ser(), bl.ser());
    }
    println!("{} trials per point in {:.1?}, csv in {out}", report.rows[0].trials, t.elapsed());
    Ok(())
}
