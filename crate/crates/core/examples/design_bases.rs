//! Regenerates the base matrices shipped in `crates/core/data/`.
//!
//! ```text
//! cargo run --release --example design_bases -- [out_dir]
//! ```

use std::path::PathBuf;

use cwgldpc::gldpc::{analyze, balanced_pattern, lift_with, BaseMatrix, CheckKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// 5G-style single-parity-check protograph: two punctured high-degree
/// information columns, two more information columns, a 4×4 double-diagonal
/// core parity block and ten degree-one extension parity columns.
fn raptor_like(seed: u64) -> Vec<Vec<u8>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = vec![vec![0u8; 18]; 14];
    for (r, row) in p.iter_mut().enumerate().take(4) {
        row[..4].fill(1);
        row[4 + r] = 1;
        row[4 + (r + 1) % 4] = 1;
    }
    p[3][2] = 0;
    p[1][4] = 1;
    for r in 4..14 {
        p[r][4 + r] = 1;
        let mut candidates: Vec<usize> = (0..8).collect();
        for _ in 0..2 + r % 2 {
            let i = rng.random_range(0..candidates.len());
            p[r][candidates.remove(i)] = 1;
        }
    }
    p
}

fn main() -> cwgldpc::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data"));
    std::fs::create_dir_all(&out)?;

    let row_a = [31, 31, 31, 32, 32, 32, 32];
    let row_b = [10, 9, 9, 9, 9, 9, 8, 8, 8, 8, 8, 8];
    let row_c = [6, 6, 6, 5, 5, 5];
    let toy = [
        [1u8, 1, 1, 1, 0, 1, 0, 1],
        [1, 1, 0, 1, 1, 0, 1, 1],
        [0, 1, 1, 0, 1, 1, 1, 0],
        [1, 0, 1, 1, 1, 1, 0, 1],
    ];
    let designs: Vec<(&str, &str, Vec<Vec<u8>>, usize, Vec<usize>, CheckKind)> = vec![
        (
            "scenario_a.base",
            "CW-GLDPC, 7x102 base, lift 60, two punctured dense columns",
            balanced_pattern(&row_a, 102, &[0, 1], 0)?,
            60,
            vec![0, 1],
            CheckKind::CwDual,
        ),
        (
            "scenario_b.base",
            "CW-GLDPC, 12x48 base, lift 120, two punctured dense columns",
            balanced_pattern(&row_b, 48, &[0, 1], 0)?,
            120,
            vec![0, 1],
            CheckKind::CwDual,
        ),
        (
            "scenario_c.base",
            "CW-GLDPC, 6x16 base, lift 16, [256,64]",
            balanced_pattern(&row_c, 16, &[], 22)?,
            16,
            vec![],
            CheckKind::CwDual,
        ),
        (
            "ldpc_raptor_256.base",
            "single-parity-check LDPC, 14x18 base, lift 16, [256,64] after puncturing",
            raptor_like(0),
            16,
            vec![0, 1],
            CheckKind::Spc,
        ),
        (
            "toy_4x8.base",
            "CW-GLDPC toy protograph, 4x8 base, lift 8",
            toy.iter().map(|r| r.to_vec()).collect(),
            8,
            vec![],
            CheckKind::CwDual,
        ),
    ];

    for (file, title, pattern, lift, punctured, kind) in designs {
        let base = BaseMatrix::from_pattern(&pattern, lift, punctured, 0)?;
        let code = lift_with(&base, kind)?;
        let report = analyze(&code);
        let text = format!(
            "# {title}\n# N={} n_tx={} k={} avg_col_weight={:.4}\n{}",
            report.n,
            report.n_tx,
            report.k,
            report.avg_col_weight,
            base.to_text()
        );
        std::fs::write(out.join(file), text)?;
        println!(
            "{file:<22} N={:<5} n_tx={:<5} k={:<5} rate={:.4} avg_col_weight={:.4} 4-cycles={}",
            report.n,
            report.n_tx,
            report.k,
            report.rate,
            report.avg_col_weight,
            base.four_cycle_count()
        );
    }
    Ok(())
}
