//! Lifts a base matrix, reports its parameters and encodes a random message.
//!
//! ```text
//! cargo run --example build_code -- crates/core/data/scenario_b.base
//! ```

use std::path::PathBuf;

use cwgldpc::gf2::{make_encoder, syndrome};
use cwgldpc::gldpc::{analyze, lift, BaseMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> cwgldpc::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/scenario_c.base"));
    let base = BaseMatrix::read(&path)?;
    let code = lift(&base)?;
    println!("{}", serde_json::to_string_pretty(&analyze(&code))?);
    println!("4-cycles in base: {}", base.four_cycle_count());

    let enc = make_encoder(code.h())?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let msg: Vec<u8> = (0..enc.k()).map(|_| rng.random_range(0..2)).collect();
    let cw = enc.encode(&msg)?;
    let weight = cw.iter().filter(|&&b| b == 1).count();
    let clean = syndrome(code.h(), &cw)?.iter().all(|&s| s == 0);
    println!("random codeword: weight {weight} of {}, syndrome zero: {clean}", cw.len());
    Ok(())
}
