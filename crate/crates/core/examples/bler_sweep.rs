//! Block-error-rate sweep with confidence intervals and the SNR at BLER 1e-2.
//!
//! ```text
//! cargo run --release --example bler_sweep -- MS_CW 10
//! ```

use std::path::PathBuf;

use cwgldpc::decoder::{Algorithm, DecoderConfig, Schedule};
use cwgldpc::gldpc::{lift, BaseMatrix};
use cwgldpc::simkit::{run_bler, snr_at_bler, wilson_interval, StopRule};

fn main() -> cwgldpc::Result<()> {
    let mut args = std::env::args().skip(1);
    let algorithm: Algorithm = serde_json::from_value(serde_json::Value::String(args.next().unwrap_or("MS_CW".into())))?;
    let iters = args.next().map_or(10, |a| a.parse().expect("iteration count"));
    let code = lift(&BaseMatrix::read(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/scenario_c.base"))?)?;
    let cfg = DecoderConfig::new(algorithm, Schedule::Layered, iters);
    let sweep: Vec<f64> = (0..7).map(|i| -1.0 + 0.5 * i as f64).collect();
    let stop = StopRule {
        min_block_errors: 100,
        max_blocks: 100_000,
    };
    let report = run_bler(&code, &cfg, &sweep, stop, 1)?;
    print!("{}", report.summary());
    for p in &report.points {
        let (lo, hi) = wilson_interval(p.block_errors, p.blocks, 1.96);
        println!("{:>6.2} dB  95% BLER interval [{lo:.2e}, {hi:.2e}]", p.es_n0_db);
    }
    match snr_at_bler(&report.points, 1e-2) {
        Some(s) => println!("BLER 1e-2 reached at {s:.3} dB"),
        None => println!("BLER 1e-2 not crossed in the sweep"),
    }
    Ok(())
}
