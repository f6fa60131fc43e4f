//! Compares every closed-form moment against brute-force Monte Carlo.
//!
//! Usage: cargo run --release --example oracle_self_check -- [instances] [draws]

use onebit_mimo::oracle::validation::self_check;

fn main() -> onebit_mimo::Result<()> {
    let mut args = std::env::args().skip(1);
    let instances = args.next().and_then(|a| a.parse().ok()).unwrap_or(6);
    let draws = args.next().and_then(|a| a.parse().ok()).unwrap_or(100_000);

    let t = std::time::Instant::now();
    let report = self_check(instances, draws, 2024)?;
    println!("{report}");
    println!("{instances} instances in {:.1?}", t.elapsed());
    Ok(())
}
