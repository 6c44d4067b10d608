//! Quantized density-evolution threshold of a base matrix, and the error
//! trajectory just above it.
//!
//! ```text
//! cargo run --release --example density_threshold -- crates/core/data/scenario_c.base
//! ```

use std::path::PathBuf;

use cwgldpc::evolve::{de_threshold, de_trace, DeConfig, Search};
use cwgldpc::gldpc::BaseMatrix;

fn main() -> cwgldpc::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/scenario_c.base"));
    let base = BaseMatrix::read(&path)?;
    let cfg = DeConfig::default();
    let t = de_threshold(&base, &cfg, &Search::default())?;
    println!("threshold {t:.3} dB ({} iterations, target {:.0e}, delta {})", cfg.iters, cfg.target_err, cfg.delta);
    for offset in [-0.2, 0.2] {
        let trace = de_trace(&base, t + offset, &cfg)?;
        let every: Vec<String> = trace.iter().step_by(10).map(|e| format!("{e:.2e}")).collect();
        println!("{:+.1} dB: error every 10 iterations {}", offset, every.join(" "));
    }
    Ok(())
}
