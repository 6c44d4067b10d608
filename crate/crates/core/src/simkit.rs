//! Monte-Carlo block error rate estimation over QPSK/AWGN.
//!
//! Each block draws its noise from its own ChaCha stream keyed by
//! `(seed, point, block)`. Blocks are simulated in fixed batches and the
//! stopping point is found by scanning outcomes in block order, so the report
//! does not depend on how many worker threads ran the batches.

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decoder::{Decoder, DecoderConfig};
use crate::error::{Error, Result};
use crate::gf2::{make_encoder, SystematicEncoder};
use crate::gldpc::LiftedCode;

/// Gray-mapped QPSK with unit symbol energy over AWGN.
///
/// Each code bit rides on one real dimension with amplitude `√(Es/2)` and
/// noise variance `N0/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub es_n0_db: f64,
}

impl ChannelSpec {
    pub fn new(es_n0_db: f64) -> Self {
        ChannelSpec { es_n0_db }
    }

    /// Noise density for `Es = 1`.
    pub fn n0(&self) -> f64 {
        10f64.powf(-self.es_n0_db / 10.0)
    }

    pub fn amplitude(&self) -> f64 {
        0.5f64.sqrt()
    }

    pub fn noise_std(&self) -> f64 {
        (self.n0() / 2.0).sqrt()
    }

    /// Factor mapping a received sample to its LLR, `4·√(Es/2)/N0`.
    pub fn llr_scale(&self) -> f64 {
        4.0 * self.amplitude() / self.n0()
    }

    /// Mean of the LLR of a transmitted zero, `2·Es/N0`. The variance is twice this.
    pub fn llr_mean(&self) -> f64 {
        2.0 / self.n0()
    }
}

/// Channel LLRs for `bits` (all-zero when `None`). Punctured positions get 0
/// and consume no randomness.
pub fn transmit<R: Rng + ?Sized>(code: &LiftedCode, bits: Option<&[u8]>, spec: &ChannelSpec, rng: &mut R) -> Result<Vec<f64>> {
    let n = code.n();
    if let Some(b) = bits {
        if b.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: b.len() });
        }
    }
    let mut out = vec![0.0; n];
    fill_llrs(&mut out, &code.transmitted_mask(), bits, spec, rng);
    Ok(out)
}

fn fill_llrs<R: Rng + ?Sized>(out: &mut [f64], mask: &[bool], bits: Option<&[u8]>, spec: &ChannelSpec, rng: &mut R) {
    let (a, sigma, scale) = (spec.amplitude(), spec.noise_std(), spec.llr_scale());
    for (i, o) in out.iter_mut().enumerate() {
        if !mask[i] {
            *o = 0.0;
            continue;
        }
        let x = match bits.map(|b| b[i]) {
            Some(1) => -a,
            _ => a,
        };
        let w: f64 = rng.sample(StandardNormal);
        *o = scale * (x + sigma * w);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StopRule {
    pub min_block_errors: u64,
    pub max_blocks: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule {
            min_block_errors: 100,
            max_blocks: 100_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimPoint {
    pub es_n0_db: f64,
    pub blocks: u64,
    pub block_errors: u64,
    pub bit_errors: u64,
    pub bler: f64,
    pub ber: f64,
    pub avg_iterations: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub points: Vec<SimPoint>,
    pub seed: u64,
    pub config: serde_json::Value,
}

/// Knobs that shape the simulation without changing its statistics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimOptions {
    /// Every `spot_check_period`-th block sends a random encoded message
    /// instead of the all-zero word. 0 disables spot checks.
    pub spot_check_period: u64,
    /// Send random encoded messages in every block.
    pub random_messages: bool,
    pub batch: u64,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            spot_check_period: 1000,
            random_messages: false,
            batch: 256,
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct Outcome {
    block_error: bool,
    bit_errors: u64,
    iterations: u64,
}

/// Independent stream for one block of one SNR point.
pub fn block_rng(seed: u64, point: usize, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((point as u64) << 40) | block);
    rng
}

/// BLER sweep using the default options and all available threads.
pub fn run_bler(code: &LiftedCode, cfg: &DecoderConfig, sweep: &[f64], stop: StopRule, seed: u64) -> Result<SimReport> {
    run_bler_with(code, cfg, sweep, stop, seed, &SimOptions::default(), 0)
}

/// BLER sweep on `workers` threads (0 picks the available parallelism).
pub fn run_bler_with(
    code: &LiftedCode,
    cfg: &DecoderConfig,
    sweep: &[f64],
    stop: StopRule,
    seed: u64,
    opts: &SimOptions,
    workers: usize,
) -> Result<SimReport> {
    cfg.validate()?;
    if opts.batch == 0 {
        return Err(Error::InvalidConfig("batch must be positive".into()));
    }
    if stop.max_blocks == 0 {
        return Err(Error::InvalidConfig("max_blocks must be positive".into()));
    }
    // fail fast on a mismatched decoder before spinning up workers
    Decoder::new(code, cfg)?;
    let encoder = if opts.random_messages || opts.spot_check_period > 0 {
        Some(make_encoder(code.h())?)
    } else {
        None
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let mask = code.transmitted_mask();

    let mut points = Vec::with_capacity(sweep.len());
    for (pi, &snr) in sweep.iter().enumerate() {
        let spec = ChannelSpec::new(snr);
        let mut acc = SimPoint {
            es_n0_db: snr,
            blocks: 0,
            block_errors: 0,
            bit_errors: 0,
            bler: 0.0,
            ber: 0.0,
            avg_iterations: 0.0,
        };
        let mut iterations = 0u64;
        'batches: while acc.blocks < stop.max_blocks {
            let start = acc.blocks;
            let end = (start + opts.batch).min(stop.max_blocks);
            let outcomes: Vec<Outcome> = pool.install(|| {
                (start..end)
                    .into_par_iter()
                    .map_init(
                        || (Decoder::new(code, cfg).expect("validated above"), vec![0.0; code.n()]),
                        |(dec, llrs), b| simulate_block(dec, llrs, &mask, encoder.as_ref(), &spec, opts, seed, pi, b),
                    )
                    .collect()
            });
            for o in outcomes {
                acc.blocks += 1;
                acc.block_errors += o.block_error as u64;
                acc.bit_errors += o.bit_errors;
                iterations += o.iterations;
                if acc.block_errors >= stop.min_block_errors {
                    break 'batches;
                }
            }
        }
        acc.bler = acc.block_errors as f64 / acc.blocks as f64;
        acc.ber = acc.bit_errors as f64 / (acc.blocks as f64 * code.n() as f64);
        acc.avg_iterations = iterations as f64 / acc.blocks as f64;
        points.push(acc);
    }
    Ok(SimReport {
        points,
        seed,
        config: serde_json::json!({
            "decoder": cfg,
            "es_n0_db": sweep,
            "stop": stop,
            "options": opts,
            "seed": seed,
            "code": { "N": code.n(), "n_tx": code.n_tx(), "k": code.k(), "check_kind": code.kind() },
        }),
    })
}

#[allow(clippy::too_many_arguments)]
fn simulate_block(
    dec: &mut Decoder,
    llrs: &mut [f64],
    mask: &[bool],
    encoder: Option<&SystematicEncoder>,
    spec: &ChannelSpec,
    opts: &SimOptions,
    seed: u64,
    point: usize,
    block: u64,
) -> Outcome {
    let mut rng = block_rng(seed, point, block);
    let encoded = opts.random_messages || (opts.spot_check_period > 0 && block % opts.spot_check_period == 0);
    let word = match (encoded, encoder) {
        (true, Some(enc)) => {
            let msg: Vec<u8> = (0..enc.k()).map(|_| rng.random_range(0..2u8)).collect();
            Some(enc.encode(&msg).expect("message length matches encoder"))
        }
        _ => None,
    };
    fill_llrs(llrs, mask, word.as_deref(), spec, &mut rng);
    let r = dec.decode(llrs).expect("length matches code");
    let bit_errors = match &word {
        Some(w) => r.hard_bits.iter().zip(w).filter(|(a, b)| a != b).count(),
        None => r.hard_bits.iter().filter(|&&b| b != 0).count(),
    } as u64;
    Outcome {
        block_error: bit_errors > 0,
        bit_errors,
        iterations: r.iterations_used as u64,
    }
}

impl SimReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("es_n0_db,blocks,block_errors,bit_errors,bler,ber,avg_iters\n");
        for p in &self.points {
            writeln!(
                s,
                "{},{},{},{},{},{},{}",
                p.es_n0_db, p.blocks, p.block_errors, p.bit_errors, p.bler, p.ber, p.avg_iterations
            )
            .unwrap();
        }
        s
    }

    /// Writes the CSV to `path` and the full report (with config echo) next to
    /// it with a `.json` extension.
    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv())?;
        std::fs::write(path.with_extension("json"), serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    /// Human readable table.
    pub fn summary(&self) -> String {
        let mut s = format!("{:>9} {:>9} {:>7} {:>11} {:>11} {:>7}\n", "Es/N0", "blocks", "errors", "BLER", "BER", "iters");
        for p in &self.points {
            writeln!(
                s,
                "{:>9.3} {:>9} {:>7} {:>11.4e} {:>11.4e} {:>7.2}",
                p.es_n0_db, p.blocks, p.block_errors, p.bler, p.ber, p.avg_iterations
            )
            .unwrap();
        }
        s
    }
}

/// Wilson score interval for `k` successes in `n` trials at normal quantile `z`.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let (k, n) = (k as f64, n as f64);
    let p = k / n;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// SNR at which the BLER curve crosses `target`, interpolating linearly in
/// `log10(BLER)` between the bracketing points. Points must be sorted by SNR.
pub fn snr_at_bler(points: &[SimPoint], target: f64) -> Option<f64> {
    let floor = |p: &SimPoint| p.bler.max(0.5 / p.blocks as f64);
    points.windows(2).find_map(|w| {
        let (a, b) = (&w[0], &w[1]);
        let (la, lb) = (floor(a).log10(), floor(b).log10());
        let t = target.log10();
        (la >= t && lb <= t && la > lb).then(|| a.es_n0_db + (la - t) / (la - lb) * (b.es_n0_db - a.es_n0_db))
    })
}
