//! Genetic search over base-matrix edge patterns, scored by density evolution.
//!
//! Each generation scores every candidate by its DE error probability at the
//! current SNR, keeps the best `survivors`, and refills the population with
//! perturbed copies of them. Whenever the best candidate reaches the target
//! error the SNR is lowered by one step.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::de::{de_error_after, DeConfig};
use crate::error::{Error, Result};
use crate::gldpc::{BaseMatrix, CheckKind};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GaConfig {
    pub population: usize,
    pub survivors: usize,
    /// Probability of flipping each base-matrix entry in a mutant.
    pub mutation_rate: f64,
    pub generations: usize,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population: 32,
            survivors: 8,
            mutation_rate: 0.02,
            generations: 20,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnrSchedule {
    pub start_db: f64,
    #[serde(default = "default_step")]
    pub step_db: f64,
}

fn default_step() -> f64 {
    0.05
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationLog {
    pub generation: usize,
    pub snr_db: f64,
    pub best_err: f64,
    pub best_matrix_hash: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizeResult {
    /// Candidate that met the target at the lowest SNR (the seed if none did).
    pub best: BaseMatrix,
    /// SNR at which `best` met the target, if any candidate did.
    pub best_snr_db: Option<f64>,
    pub history: Vec<GenerationLog>,
}

/// SHA-256 of the matrix in its text form, hex encoded.
pub fn matrix_hash(base: &BaseMatrix) -> String {
    Sha256::digest(base.to_text().as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Flips each entry with probability `rate`, skipping flips that would drop a
/// row below `min_row` or a column below its minimum degree (2 for punctured
/// columns, 1 otherwise). New edges draw a uniform shift.
pub fn mutate<R: Rng + ?Sized>(base: &BaseMatrix, rate: f64, min_row: usize, rng: &mut R) -> BaseMatrix {
    let mut out = base.clone();
    for r in 0..base.rows() {
        for c in 0..base.cols() {
            if !rng.random_bool(rate) {
                continue;
            }
            if out.has_edge(r, c) {
                let min_col = if out.is_punctured(c) { 2 } else { 1 };
                if out.row_degree(r) > min_row && out.col_degree(c) > min_col {
                    out.set(r, c, None);
                }
            } else {
                let s = rng.random_range(0..out.lift());
                out.set(r, c, Some(s));
            }
        }
    }
    out
}

/// Runs the genetic loop. `log` receives one JSON line per generation.
pub fn optimize(
    seed_base: &BaseMatrix,
    ga: &GaConfig,
    schedule: &SnrSchedule,
    de: &DeConfig,
    mut log: Option<&mut dyn Write>,
) -> Result<OptimizeResult> {
    de.validate()?;
    if ga.population == 0 || ga.survivors == 0 || ga.survivors > ga.population {
        return Err(Error::InvalidConfig("need 0 < survivors <= population".into()));
    }
    if !(0.0..=1.0).contains(&ga.mutation_rate) {
        return Err(Error::InvalidConfig("mutation_rate must lie in [0, 1]".into()));
    }
    if !(schedule.step_db > 0.0) {
        return Err(Error::InvalidConfig("step_db must be positive".into()));
    }
    let min_row = match de.check {
        CheckKind::CwDual => 3,
        CheckKind::Spc => 2,
    };
    // validates the seed
    super::de::ProtoState::new(seed_base, schedule.start_db, de)?;

    let mut rng = ChaCha8Rng::seed_from_u64(ga.seed);
    let mut population = vec![seed_base.clone()];
    while population.len() < ga.population {
        population.push(mutate(seed_base, ga.mutation_rate, min_row, &mut rng));
    }

    let mut snr = schedule.start_db;
    let mut best = seed_base.clone();
    let mut best_snr = None;
    let mut history = Vec::with_capacity(ga.generations);
    for generation in 0..ga.generations {
        let scores: Vec<f64> = population
            .par_iter()
            .map(|b| de_error_after(b, snr, de).unwrap_or(1.0))
            .collect();
        let mut order: Vec<usize> = (0..population.len()).collect();
        order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));

        let leader = &population[order[0]];
        let entry = GenerationLog {
            generation,
            snr_db: snr,
            best_err: scores[order[0]],
            best_matrix_hash: matrix_hash(leader),
        };
        if let Some(w) = log.as_deref_mut() {
            writeln!(w, "{}", serde_json::to_string(&entry)?)?;
        }
        history.push(entry);
        if scores[order[0]] <= de.target_err {
            best = leader.clone();
            best_snr = Some(snr);
            snr -= schedule.step_db;
        }

        let parents: Vec<BaseMatrix> = order.iter().take(ga.survivors).map(|&i| population[i].clone()).collect();
        let mut next = parents.clone();
        let mut i = 0;
        while next.len() < ga.population {
            next.push(mutate(&parents[i % parents.len()], ga.mutation_rate, min_row, &mut rng));
            i += 1;
        }
        population = next;
    }
    Ok(OptimizeResult {
        best,
        best_snr_db: best_snr,
        history,
    })
}
