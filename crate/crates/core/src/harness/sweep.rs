use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use super::config::{Detector, ExperimentConfig};
use super::report::{SweepReport, SweepRow};
use crate::channel::ChannelRealization;
use crate::detect::{ml_detect_batch, BlmmseDetector, CandidateTable};
use crate::num::{complex_normal, db_to_linear, dbm_to_linear, CVector, Constellation, Purpose, RMatrix, SeededRng};
use crate::txchain::{transmit, TxConfig};
use crate::{Error, Result};

/// Symbol vectors per parallel work item.
const BATCH: usize = 256;

/// One simulated channel use.
#[derive(Debug, Clone)]
pub struct Trial {
    /// Transmitted per-stream constellation indices.
    pub indices: Vec<usize>,
    pub y: CVector,
}

/// Draws symbol vector `j` of channel `c`.
///
/// Symbols, dither and noise come from streams keyed by `(c, j)` only, so
/// every sweep point of a channel sees the same underlying randomness
/// (the dither is the same standard-normal draw scaled by `sigma`).
pub fn draw_trial(
    rng: &SeededRng,
    chan: &ChannelRealization,
    tx: &TxConfig,
    rho: f64,
    c: u64,
    j: u64,
) -> Result<Trial> {
    let l = tx.constellation.len();
    let mut sr = rng.stream(c, j, Purpose::Symbols);
    let indices: Vec<usize> = (0..chan.n_streams()).map(|_| sr.random_range(0..l)).collect();
    let s = CVector::from_iterator(indices.len(), indices.iter().map(|&i| tx.constellation.point(i)));
    let real = transmit(&chan.w, &s, tx, &mut rng.stream(c, j, Purpose::Dither))?;
    let mut nr = rng.stream(c, j, Purpose::Noise);
    let y = (&chan.h * &real.x_q).map(|v| v * rho.sqrt()) + CVector::from_fn(chan.n_rx(), |_, _| complex_normal(&mut nr, 1.0));
    Ok(Trial { indices, y })
}

fn guess(rng: &SeededRng, constellation: &Constellation, k: usize, c: u64, j: u64) -> Vec<usize> {
    let mut r = rng.stream(c, j, Purpose::Guess);
    (0..k).map(|_| r.random_range(0..constellation.len())).collect()
}

fn count_errors(truth: &[usize], decided: &[usize]) -> u64 {
    truth.iter().zip(decided).filter(|(a, b)| a != b).count() as u64
}

/// `(errors, seconds)` per configured detector at one sweep point.
fn run_point(
    cfg: &ExperimentConfig,
    rng: &SeededRng,
    chan: &ChannelRealization,
    c: u64,
    rho_db: f64,
    dither_dbm: f64,
) -> Result<Vec<(u64, f64)>> {
    let rho = db_to_linear(rho_db);
    let tx = TxConfig::new(cfg.n_tx, dbm_to_linear(dither_dbm), cfg.constellation()?)?;
    let mut out = vec![(0u64, 0.0f64); cfg.detectors.len()];

    let mut table = None;
    let mut blmmse = None;
    for (slot, d) in cfg.detectors.iter().enumerate() {
        let t = Instant::now();
        match d {
            Detector::Ml => table = Some(CandidateTable::build(&chan.h, &chan.w, &tx, rho, cfg.max_candidates)?),
            Detector::Blmmse => blmmse = Some(BlmmseDetector::build(&chan.h, &chan.w, &tx, rho)?),
            Detector::RandomGuess => {}
        }
        out[slot].1 += t.elapsed().as_secs_f64();
    }

    let n = cfg.n_symbol_vectors;
    let batches: Vec<Vec<(u64, f64)>> = (0..n.div_ceil(BATCH))
        .into_par_iter()
        .map(|b| -> Result<Vec<(u64, f64)>> {
            let range = (b * BATCH) as u64..((b + 1) * BATCH).min(n) as u64;
            let trials: Vec<Trial> = range
                .clone()
                .map(|j| draw_trial(rng, chan, &tx, rho, c, j))
                .collect::<Result<_>>()?;
            let mut res = vec![(0u64, 0.0f64); cfg.detectors.len()];
            for (slot, d) in cfg.detectors.iter().enumerate() {
                let t = Instant::now();
                res[slot].0 = match d {
                    Detector::Ml => {
                        let table = table.as_ref().expect("table built");
                        let m = chan.n_rx();
                        let ys = RMatrix::from_fn(2 * m, trials.len(), |i, col| {
                            let v = trials[col].y[i % m];
                            if i < m { v.re } else { v.im }
                        });
                        ml_detect_batch(&ys, table)?
                            .iter()
                            .zip(&trials)
                            .map(|(r, t)| count_errors(&t.indices, &r.indices))
                            .sum()
                    }
                    Detector::Blmmse => {
                        let det = blmmse.as_ref().expect("combiner built");
                        trials.iter().map(|t| count_errors(&t.indices, &det.detect(&t.y).indices)).sum()
                    }
                    Detector::RandomGuess => range
                        .clone()
                        .zip(&trials)
                        .map(|(j, t)| count_errors(&t.indices, &guess(rng, &tx.constellation, chan.n_streams(), c, j)))
                        .sum(),
                };
                res[slot].1 = t.elapsed().as_secs_f64();
            }
            Ok(res)
        })
        .collect::<Result<_>>()?;
    for b in batches {
        for (o, r) in out.iter_mut().zip(b) {
            o.0 += r.0;
            o.1 += r.1;
        }
    }
    Ok(out)
}

/// Runs every (SNR, dither) point over `n_channels` channel draws.
///
/// Work is spread over `cfg.workers` threads, but each channel and each
/// symbol vector owns its random streams and counts are summed in index
/// order, so the error counts do not depend on the worker count.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepReport> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| sweep(cfg))
}

fn sweep(cfg: &ExperimentConfig) -> Result<SweepReport> {
    let rng = SeededRng::new(cfg.seed);
    let dither = cfg.dither_points();
    let points: Vec<(f64, f64)> = cfg
        .rho_db
        .iter()
        .flat_map(|&r| dither.iter().map(move |&d| (r, d)))
        .collect();
    let params = cfg.channel_params();

    let per_channel: Vec<Vec<Vec<(u64, f64)>>> = (0..cfg.n_channels as u64)
        .into_par_iter()
        .map(|c| -> Result<Vec<Vec<(u64, f64)>>> {
            let chan = ChannelRealization::draw(&params, cfg.n_streams, &mut rng.stream(c, 0, Purpose::Channel))?;
            points
                .par_iter()
                .map(|&(r, d)| run_point(cfg, &rng, &chan, c, r, d))
                .collect()
        })
        .collect::<Result<_>>()?;

    let trials = (cfg.n_channels * cfg.n_symbol_vectors * cfg.n_streams) as u64;
    let mut rows = Vec::with_capacity(points.len() * cfg.detectors.len());
    for (p, &(rho_db, dither_dbm)) in points.iter().enumerate() {
        for (slot, &detector) in cfg.detectors.iter().enumerate() {
            let (errors, seconds) = per_channel
                .iter()
                .map(|ch| ch[p][slot])
                .fold((0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
            rows.push(SweepRow { rho_db, dither_dbm, detector, errors, trials, seconds });
        }
    }
    Ok(SweepReport {
        rows,
        seed: cfg.seed,
        config_hash: cfg.hash(),
        version: crate::VERSION.into(),
        rho_varies: cfg.rho_db.len() > 1,
        dither_varies: cfg.dither_dbm.len() > 1 || cfg.rho_db.len() == 1,
    })
}
