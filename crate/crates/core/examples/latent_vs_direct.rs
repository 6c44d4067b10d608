//! Decoding the component constraints directly versus through the expanded
//! single-parity-check graph with punctured latent bits.
//!
//! ```text
//! cargo run --release --example latent_vs_direct
//! ```

use std::path::PathBuf;

use cwgldpc::decoder::{Algorithm, DecoderConfig, Schedule};
use cwgldpc::gldpc::{analyze, lift, BaseMatrix};
use cwgldpc::simkit::{run_bler, StopRule};

fn main() -> cwgldpc::Result<()> {
    let code = lift(&BaseMatrix::read(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/scenario_c.base"))?)?;
    let latent = code.latent_code()?;
    let (a, b) = (analyze(&code), analyze(&latent));
    println!("direct graph: N={} checks={}; latent graph: N={} (punctured {}) checks={}", a.n, code.m(), b.n, b.punctured, latent.m());

    let sweep = [0.0, 0.5, 1.0, 1.5];
    let stop = StopRule {
        min_block_errors: 100,
        max_blocks: 50_000,
    };
    for (name, cfg) in [
        ("MS_CW", DecoderConfig::new(Algorithm::MsCw, Schedule::Layered, 10)),
        ("latent NMS", DecoderConfig::new(Algorithm::NmsSpc, Schedule::Layered, 10).with_latent_mode(true)),
    ] {
        println!("{name}, 10 iterations");
        print!("{}", run_bler(&code, &cfg, &sweep, stop, 2)?.summary());
    }
    Ok(())
}
