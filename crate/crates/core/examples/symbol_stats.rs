//! Per-candidate received-signal statistics behind the ML detector.
//!
//! Usage: cargo run --release --example symbol_stats

use onebit_mimo::channel::{ChannelParams, ChannelRealization};
use onebit_mimo::detect::CandidateTable;
use onebit_mimo::num::{dbm_to_linear, db_to_linear, Constellation, Purpose, SeededRng};
use onebit_mimo::oracle::{mc_moments, ConditionalSetup, MomentKind};
use onebit_mimo::stats::{lmmse_gain, symbol_stats};
use onebit_mimo::txchain::TxConfig;

fn main() -> onebit_mimo::Result<()> {
    let (n, m) = (16, 4);
    let rng = SeededRng::new(3);
    let chan = ChannelRealization::draw(&ChannelParams::new(n, m), 1, &mut rng.stream(0, 0, Purpose::Channel))?;
    let cfg = TxConfig::new(n, dbm_to_linear(5.0), Constellation::qam16())?;
    let rho = db_to_linear(5.0);

    println!("{:>5} {:>10} {:>12}", "cand", "|mu_y|", "logdet");
    for c in [0, 5, 10, 15] {
        let s = CandidateTable::symbols_of(&cfg.constellation, 1, c);
        let st = symbol_stats(&chan.h, &chan.w, &s, &cfg, rho)?;
        println!("{c:>5} {:>10.4} {:>12.4}", st.mu_y.norm(), st.logdet());
    }

    // Cross-check one candidate against the simulated chain.
    let s = CandidateTable::symbols_of(&cfg.constellation, 1, 10);
    let st = symbol_stats(&chan.h, &chan.w, &s, &cfg, rho)?;
    let g = lmmse_gain(&st.x, cfg.sigma2, cfg.eta)?;
    let setup = ConditionalSetup { h: &chan.h, x: &st.x, gain: &g, sigma2: cfg.sigma2, eta: cfg.eta, rho };
    let est = mc_moments(&[MomentKind::YMean, MomentKind::YCov], &setup, 200_000, &rng)?;
    let mu = nalgebra::DMatrix::from_column_slice(2 * m, 1, st.mu_y.as_slice());
    let second = &st.sigma_y + &st.mu_y * st.mu_y.transpose();
    let (a, at) = est[0].agreement(&mu, 4.0);
    let (b, bt) = est[1].agreement(&second, 4.0);
    println!("closed form vs Monte Carlo: mean {a}/{at}, second moment {b}/{bt} entries within 4 SE");
    Ok(())
}
