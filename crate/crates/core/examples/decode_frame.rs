//! Sends one codeword over the AWGN channel and decodes it with each
//! algorithm, printing the bit-error count after every iteration.
//!
//! ```text
//! cargo run --release --example decode_frame -- 0.5
//! ```

use std::path::PathBuf;

use cwgldpc::decoder::{Algorithm, Decoder, DecoderConfig, Schedule};
use cwgldpc::gf2::make_encoder;
use cwgldpc::gldpc::{lift, BaseMatrix};
use cwgldpc::simkit::{transmit, ChannelSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> cwgldpc::Result<()> {
    let es_n0_db = std::env::args().nth(1).map_or(0.5, |a| a.parse().expect("Es/N0 in dB"));
    let code = lift(&BaseMatrix::read(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/scenario_c.base"))?)?;
    let enc = make_encoder(code.h())?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let msg: Vec<u8> = (0..enc.k()).map(|_| rng.random_range(0..2)).collect();
    let cw = enc.encode(&msg)?;
    let llr = transmit(&code, Some(&cw), &ChannelSpec { es_n0_db }, &mut rng)?;
    let raw = llr.iter().zip(&cw).filter(|(l, &b)| (**l < 0.0) != (b == 1)).count();
    println!("Es/N0 {es_n0_db} dB, {raw} hard-decision errors on the channel");

    let runs = [
        ("SP_HR layered", DecoderConfig::new(Algorithm::SpHr, Schedule::Layered, 30)),
        ("MS_CW layered", DecoderConfig::new(Algorithm::MsCw, Schedule::Layered, 30)),
        ("MS_CW flooding", DecoderConfig::new(Algorithm::MsCw, Schedule::Flooding, 30)),
        ("latent NMS", DecoderConfig::new(Algorithm::NmsSpc, Schedule::Layered, 30).with_latent_mode(true)),
    ];
    for (name, cfg) in runs {
        let r = Decoder::new(&code, &cfg)?.decode_traced(&llr, &cw)?;
        println!(
            "{name:<15} converged={} after {:>2} iterations, errors per iteration {:?}",
            r.converged,
            r.iterations_used,
            r.error_trace.unwrap_or_default()
        );
    }
    Ok(())
}
