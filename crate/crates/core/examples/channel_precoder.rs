//! Draw a clustered ULA channel, build the SVD precoder, and round-trip the
//! matrix through both file formats.
//!
//! Usage: cargo run --release --example channel_precoder -- [out_dir]

use onebit_mimo::channel::{
    read_matrix_binary, read_matrix_text, write_matrix_binary, write_matrix_text, ChannelParams,
    ChannelRealization,
};
use onebit_mimo::num::{Purpose, SeededRng};

fn main() -> onebit_mimo::Result<()> {
    let dir = std::env::args().nth(1).map(Into::into).unwrap_or_else(std::env::temp_dir);
    let params = ChannelParams::new(128, 16);
    let chan = ChannelRealization::draw(&params, 3, &mut SeededRng::new(11).stream(0, 0, Purpose::Channel))?;

    let mean_power = chan.h.norm_squared() / (chan.n_rx() * chan.n_tx()) as f64;
    println!("H: {}x{}, mean |h|^2 = {mean_power:.3}", chan.n_rx(), chan.n_tx());
    println!("top singular values: {:.3?}", chan.singular_values.as_slice());
    // W has orthonormal columns, so ||W s||^2 = ||s||^2.
    let gram = chan.w.adjoint() * &chan.w;
    println!("W^H W diagonal: {:.6?}", gram.diagonal().iter().map(|z| z.re).collect::<Vec<_>>());

    let bin = dir.join("channel.cmat");
    let txt = dir.join("channel.txt");
    write_matrix_binary(&bin, &chan.h)?;
    write_matrix_text(&txt, &chan.h)?;
    let back_bin = read_matrix_binary(&bin)?;
    let back_txt = read_matrix_text(&txt)?;
    println!(
        "binary round-trip exact: {}, text round-trip max error: {:.1e}",
        back_bin == chan.h,
        (&back_txt - &chan.h).camax()
    );
    println!("wrote {} and {}", bin.display(), txt.display());
    Ok(())
}
