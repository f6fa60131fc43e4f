//! Detector cross-checks against brute-force references.

use std::time::Instant;

use num_complex::Complex64;
use onebit_mimo::channel::{ChannelParams, ChannelRealization};
use onebit_mimo::detect::{ml_detect, ml_detect_batch, BlmmseDetector, CandidateTable};
use onebit_mimo::num::{
    complex_normal, quantize_1bit, stack_complex, CMatrix, CVector, Constellation, Purpose, RMatrix, SeededRng,
};
use onebit_mimo::oracle::mc_gaussian_loglike;
use onebit_mimo::txchain::TxConfig;

fn qam4() -> Constellation {
    Constellation::qpsk()
}

#[test]
fn ml_matches_dense_inverse_oracle() {
    let rng = SeededRng::new(17);
    let cfg = TxConfig::new(8, 0.05, qam4()).unwrap();
    for trial in 0..100u64 {
        let mut r = rng.stream(trial, 0, Purpose::Custom(3));
        let h = CMatrix::from_fn(2, 8, |_, _| complex_normal(&mut r, 1.0));
        let chan = ChannelRealization::new(h, 1).unwrap();
        let table = CandidateTable::build(&chan.h, &chan.w, &cfg, 3.0, 16).unwrap();
        let y = CVector::from_fn(2, |_, _| complex_normal(&mut r, 4.0));
        let ys = stack_complex(&y);
        let dense: Vec<f64> = table
            .entries
            .iter()
            .map(|e| mc_gaussian_loglike(&ys, &e.mu_y, &e.sigma_y).unwrap())
            .collect();
        let best = (0..dense.len()).fold(0, |b, i| if dense[i] < dense[b] { i } else { b });
        assert_eq!(ml_detect(&y, &table).unwrap().indices, vec![best], "trial {trial}");
    }
}

/// Soft-estimate MSE for Gaussian symbols, where the BLMMSE combiner is the
/// exact linear MMSE solution.
fn empirical_mse(v: &CMatrix, chan: &ChannelRealization, cfg: &TxConfig, rho: f64, draws: u64) -> f64 {
    let rng = SeededRng::new(8);
    let k = chan.n_streams();
    let mut total = 0.0;
    for j in 0..draws {
        let mut r = rng.stream(0, j, Purpose::Custom(4));
        let s = CVector::from_fn(k, |_, _| complex_normal(&mut r, 1.0));
        let xd = &chan.w * &s + CVector::from_fn(chan.n_tx(), |_, _| complex_normal(&mut r, cfg.sigma2));
        let xq = quantize_1bit(&xd, cfg.eta).unwrap();
        let y = (&chan.h * xq).map(|z| z * rho.sqrt()) + CVector::from_fn(chan.n_rx(), |_, _| complex_normal(&mut r, 1.0));
        total += (v.adjoint() * y - s).norm_squared();
    }
    total / draws as f64
}

#[test]
fn blmmse_combiner_beats_perturbations() {
    let params = ChannelParams::new(16, 4);
    let chan = ChannelRealization::draw(&params, 2, &mut SeededRng::new(4).stream(0, 0, Purpose::Channel)).unwrap();
    let cfg = TxConfig::new(16, 0.01, Constellation::qam16()).unwrap();
    let rho = 3.0;
    let v = BlmmseDetector::build(&chan.h, &chan.w, &cfg, rho).unwrap().combiner;
    let draws = 100_000;
    let base = empirical_mse(&v, &chan, &cfg, rho, draws);
    let mut r = SeededRng::new(5).stream(0, 0, Purpose::Custom(5));
    for t in 0..10 {
        let d = CMatrix::from_fn(v.nrows(), v.ncols(), |_, _| complex_normal(&mut r, 1.0));
        let d = &d * Complex64::new(0.2 * v.norm() / d.norm(), 0.0);
        for a in [&v + &d, &v - &d] {
            assert!(empirical_mse(&a, &chan, &cfg, rho, draws) > base, "perturbation {t}");
        }
    }
}

#[test]
fn per_vector_cost_does_not_grow_with_n() {
    let time_for = |n: usize| {
        let chan = ChannelRealization::draw(&ChannelParams::new(n, 8), 1, &mut SeededRng::new(6).stream(0, 0, Purpose::Channel))
            .unwrap();
        let cfg = TxConfig::new(n, 0.003, Constellation::qam16()).unwrap();
        let table = CandidateTable::build(&chan.h, &chan.w, &cfg, 3.0, 16).unwrap();
        let mut r = SeededRng::new(7).stream(0, 0, Purpose::Custom(6));
        let ys = RMatrix::from_fn(16, 4000, |_, _| complex_normal(&mut r, 2.0).re);
        // best of three to shrug off scheduler noise
        (0..3)
            .map(|_| {
                let t = Instant::now();
                ml_detect_batch(&ys, &table).unwrap();
                t.elapsed().as_secs_f64()
            })
            .fold(f64::INFINITY, f64::min)
    };
    let small = time_for(16);
    let large = time_for(512);
    assert!(large < 2.5 * small + 2e-3, "N=16: {small:.4}s, N=512: {large:.4}s");
}
