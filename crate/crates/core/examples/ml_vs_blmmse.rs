//! Detect a batch of 16-QAM transmissions with ML and BLMMSE on one channel.
//!
//! Usage: cargo run --release --example ml_vs_blmmse -- [dither_dbm]

use onebit_mimo::channel::{ChannelParams, ChannelRealization};
use onebit_mimo::detect::{ml_detect, BlmmseDetector, CandidateTable, DEFAULT_MAX_CANDIDATES};
use onebit_mimo::harness::draw_trial;
use onebit_mimo::num::{dbm_to_linear, db_to_linear, Constellation, Purpose, SeededRng};
use onebit_mimo::txchain::TxConfig;

fn main() -> onebit_mimo::Result<()> {
    let dither_dbm: f64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(0.0);
    let (n, m, k, vectors) = (128, 16, 1, 2000);
    let rng = SeededRng::new(42);
    let chan = ChannelRealization::draw(&ChannelParams::new(n, m), k, &mut rng.stream(0, 0, Purpose::Channel))?;
    let cfg = TxConfig::new(n, dbm_to_linear(dither_dbm), Constellation::qam16())?;
    let rho = db_to_linear(5.0);

    let table = CandidateTable::build(&chan.h, &chan.w, &cfg, rho, DEFAULT_MAX_CANDIDATES)?;
    let blmmse = BlmmseDetector::build(&chan.h, &chan.w, &cfg, rho)?;

    let (mut ml_err, mut bl_err) = (0, 0);
    for j in 0..vectors {
        let t = draw_trial(&rng, &chan, &cfg, rho, 0, j)?;
        ml_err += (ml_detect(&t.y, &table)?.indices != t.indices) as usize;
        bl_err += (blmmse.detect(&t.y).indices != t.indices) as usize;
    }
    println!("sigma^2 = {dither_dbm} dBm, {vectors} vectors");
    println!("ML     SER {:.5}", ml_err as f64 / vectors as f64);
    println!("BLMMSE SER {:.5}", bl_err as f64 / vectors as f64);
    Ok(())
}
