//! Genetic search on the 4×8 toy protograph with a coarse density evolution.
//!
//! ```text
//! cargo run --release --example optimize_toy -- 20
//! ```

use std::path::PathBuf;

use cwgldpc::evolve::{de_threshold, optimize, DeConfig, GaConfig, Search, SnrSchedule};
use cwgldpc::gldpc::BaseMatrix;

fn main() -> cwgldpc::Result<()> {
    let generations = std::env::args().nth(1).map_or(20, |a| a.parse().expect("generation count"));
    let seed = BaseMatrix::read(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/toy_4x8.base"))?;
    let de = DeConfig {
        delta: 0.1,
        l_max: 20.0,
        iters: 20,
        target_err: 1e-4,
        ..DeConfig::default()
    };
    let search = Search {
        lo_db: -15.0,
        hi_db: 5.0,
        tol_db: 0.01,
    };
    let before = de_threshold(&seed, &de, &search)?;
    let ga = GaConfig {
        generations,
        ..GaConfig::default()
    };
    let mut log = std::io::stdout();
    let result = optimize(&seed, &ga, &SnrSchedule { start_db: before, step_db: 0.05 }, &de, Some(&mut log))?;
    let after = de_threshold(&result.best, &de, &search)?;
    println!("threshold {before:.3} dB -> {after:.3} dB");
    print!("{}", result.best.to_text());
    Ok(())
}
