//! Dither, quantize, and check the Bussgang linearization of the 1-bit DACs.
//!
//! Usage: cargo run --release --example quantize_bussgang

use num_complex::Complex64;
use onebit_mimo::channel::{make_precoder, draw_channel, ChannelParams};
use onebit_mimo::num::{Constellation, CVector, Purpose, SeededRng};
use onebit_mimo::oracle::{complex_parts, mc_unconditional, UncondKind, UnconditionalSetup};
use onebit_mimo::txchain::{bussgang_gain, cov_xd, cov_xq_unconditional, transmit, TxConfig};

fn main() -> onebit_mimo::Result<()> {
    let (n, m, k) = (32, 8, 2);
    let rng = SeededRng::new(7);
    let h = draw_channel(&ChannelParams::new(n, m), &mut rng.stream(0, 0, Purpose::Channel))?;
    let w = make_precoder(&h, k)?;
    let cfg = TxConfig::new(n, 1e-3, Constellation::qam16())?;

    let s = CVector::from_element(k, Complex64::new(1.0, -1.0) / 10f64.sqrt());
    let tx = transmit(&w, &s, &cfg, &mut rng.stream(0, 0, Purpose::Dither))?;
    println!("|x|^2 = {:.4}  |x_q|^2 = {}", tx.x.norm_squared(), tx.x_q.norm_squared());
    println!("first entries of x_q: {:.4} {:.4}", tx.x_q[0], tx.x_q[1]);

    let c_xd = cov_xd(&w, cfg.sigma2);
    let b = bussgang_gain(&c_xd, cfg.eta)?;
    let c_xq = cov_xq_unconditional(&c_xd, cfg.eta)?;
    println!("B_00 = {:.5}, trace C_xq = {:.6}", b[(0, 0)].re, c_xq.trace().re);

    // The distortion q_d = x_q - B x_d should be uncorrelated with x_d.
    let setup = UnconditionalSetup { h: &h, w: &w, bussgang: &b, sigma2: cfg.sigma2, eta: cfg.eta, rho: 1.0 };
    let est = mc_unconditional(&[UncondKind::BussgangResidual, UncondKind::CovXq], &setup, 200_000, &rng)?;
    let z = est[0].mean.iter().zip(est[0].std_err.iter()).map(|(m, s)| (m / s).abs()).fold(0.0, f64::max);
    println!("E[q_d x_d^H]: largest |entry| / SE = {z:.2}");
    let (ok, total) = est[1].agreement(&complex_parts(&c_xq), 4.0);
    println!("arcsine-law C_xq vs Monte Carlo: {ok}/{total} entries within 4 SE");
    Ok(())
}
