//! Command-line front end.
//!
//! ```text
//! cwgldpc build    <base> --out <alist> [--seed S] [--spc]
//! cwgldpc encode   <code> (--message 0101.. | --seed S) [--out F] [--spc]
//! cwgldpc simulate --config <json> --seed S [--out csv] [--workers N]
//! cwgldpc de       <base> [--config <json>] [--out F] [--workers N]
//! cwgldpc optimize <base> [--config <json>] --seed S --out <base> [--workers N]
//! cwgldpc analyze  <code> [--out F] [--spc]
//! ```
//!
//! A code path ending in `.alist` is read as a plain parity-check matrix;
//! anything else is a base-matrix file lifted into a CW-GLDPC code (or an SPC
//! code with `--spc`). Exit status is 0 on success, 2 for unreadable input or
//! configuration, 1 for any other failure.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::alist::{read_alist, write_alist};
use crate::decoder::DecoderConfig;
use crate::error::{Error, Result};
use crate::evolve::{de_threshold, de_trace, optimize, DeConfig, GaConfig, Search, SnrSchedule};
use crate::gf2::{make_encoder, syndrome};
use crate::gldpc::{analyze, lift_with, BaseMatrix, CheckKind, LiftedCode};
use crate::simkit::{run_bler_with, SimOptions, StopRule};

#[derive(Parser, Debug)]
#[command(name = "cwgldpc", version, about = "CW-GLDPC code construction, decoding and analysis")]
pub struct Cli {
    /// Worker threads (default: available parallelism). Results do not depend on it.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Lift a base matrix and write its parity-check matrix as alist plus a JSON sidecar.
    Build {
        base: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Redraw the circulant shifts with this seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        spc: bool,
    },
    /// Encode a message (given, or random from --seed).
    Encode {
        code: PathBuf,
        #[arg(long)]
        message: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        spc: bool,
    },
    /// Monte-Carlo BLER sweep.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Density-evolution threshold of a base matrix.
    De {
        base: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Genetic optimization of a base matrix.
    Optimize {
        base: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Structural report of a code.
    Analyze {
        path: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        spc: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub start_db: f64,
    pub stop_db: f64,
    pub step_db: f64,
}

impl Sweep {
    pub fn points(&self) -> Result<Vec<f64>> {
        if !(self.step_db > 0.0) || self.stop_db < self.start_db {
            return Err(Error::InvalidConfig("sweep needs step_db > 0 and stop_db >= start_db".into()));
        }
        let n = ((self.stop_db - self.start_db) / self.step_db + 1e-9).floor() as usize;
        Ok((0..=n).map(|i| self.start_db + i as f64 * self.step_db).collect())
    }
}

/// Configuration of `simulate`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Base-matrix or alist path, relative to the config file.
    pub code: PathBuf,
    #[serde(default = "default_kind")]
    pub check_kind: CheckKind,
    pub decoder: DecoderConfig,
    pub sweep: Sweep,
    #[serde(default)]
    pub stop: StopRule,
    #[serde(default)]
    pub options: SimOptions,
    /// Output CSV, relative to the config file. `--out` takes precedence.
    #[serde(default)]
    pub out: Option<PathBuf>,
}

/// Configuration of `de`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeRunConfig {
    pub de: DeConfig,
    pub search: Search,
    /// Report the per-iteration error trace at this SNR instead of a threshold.
    pub es_n0_db: Option<f64>,
}

/// Configuration of `optimize`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizeConfig {
    pub ga: GaConfig,
    pub de: DeConfig,
    /// Starting SNR; the seed matrix's threshold when absent.
    pub start_db: Option<f64>,
    pub step_db: f64,
    pub search: Search,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        OptimizeConfig {
            ga: GaConfig::default(),
            de: DeConfig::default(),
            start_db: None,
            step_db: 0.05,
            search: Search::default(),
        }
    }
}

fn default_kind() -> CheckKind {
    CheckKind::CwDual
}

#[derive(Serialize)]
struct Sidecar {
    #[serde(rename = "N")]
    n: usize,
    n_tx: usize,
    k: usize,
    rate: f64,
    avg_col_weight: f64,
    punctured: usize,
}

/// Parses `args` (program name first) and runs the command, returning the exit status.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } | Error::Json(_) | Error::InvalidConfig(_) => 2,
        _ => 1,
    }
}

/// Loads a code: `.alist` files as plain LDPC codes, anything else as a base matrix.
pub fn load_code(path: &Path, kind: CheckKind) -> Result<LiftedCode> {
    if path.extension().is_some_and(|e| e == "alist") {
        LiftedCode::from_spc_pcm(read_alist(path)?, Vec::new())
    } else {
        lift_with(&BaseMatrix::read(path)?, kind)
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: Some(path.to_path_buf()),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn kind(spc: bool) -> CheckKind {
    if spc {
        CheckKind::Spc
    } else {
        CheckKind::CwDual
    }
}

fn pool(workers: Option<usize>) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidConfig(e.to_string()))
}

fn bits_to_string(bits: &[u8]) -> String {
    bits.iter().map(|b| if *b == 1 { '1' } else { '0' }).collect()
}

pub fn run(cli: Cli) -> Result<()> {
    let workers = cli.workers;
    if workers == Some(0) {
        return Err(Error::InvalidConfig("--workers must be positive".into()));
    }
    match cli.command {
        Command::Build { base, out, seed, spc } => {
            let mut b = BaseMatrix::read(&base)?;
            if let Some(s) = seed {
                b.reshift(s, 64);
            }
            let code = lift_with(&b, kind(spc))?;
            let r = analyze(&code);
            write_alist(&out, code.h())?;
            let sidecar = Sidecar {
                n: r.n,
                n_tx: r.n_tx,
                k: r.k,
                rate: r.rate,
                avg_col_weight: r.avg_col_weight,
                punctured: r.punctured,
            };
            let json = serde_json::to_string_pretty(&sidecar)?;
            std::fs::write(out.with_extension("json"), &json)?;
            println!("{json}");
        }
        Command::Encode {
            code,
            message,
            seed,
            out,
            spc,
        } => {
            let code = load_code(&code, kind(spc))?;
            let enc = make_encoder(code.h())?;
            let msg: Vec<u8> = match (message, seed) {
                (Some(m), _) => m
                    .chars()
                    .map(|c| match c {
                        '0' => Ok(0),
                        '1' => Ok(1),
                        _ => Err(Error::InvalidConfig(format!("message may only contain 0 and 1, found `{c}`"))),
                    })
                    .collect::<Result<_>>()?,
                (None, Some(s)) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(s);
                    (0..enc.k()).map(|_| rng.random_range(0..2u8)).collect()
                }
                (None, None) => return Err(Error::InvalidConfig("encode needs --message or --seed".into())),
            };
            let cw = enc.encode(&msg)?;
            let ok = syndrome(code.h(), &cw)?.iter().all(|&b| b == 0);
            let json = serde_json::json!({
                "n": code.n(),
                "k": enc.k(),
                "message": bits_to_string(&msg),
                "codeword": bits_to_string(&cw),
                "syndrome_ok": ok,
            });
            emit(out.as_deref(), &serde_json::to_string_pretty(&json)?)?;
        }
        Command::Simulate { config, seed, out } => {
            let cfg: RunConfig = read_json(&config)?;
            let dir = config.parent().unwrap_or(Path::new(""));
            let code = load_code(&dir.join(&cfg.code), cfg.check_kind)?;
            let sweep = cfg.sweep.points()?;
            let mut report = run_bler_with(
                &code,
                &cfg.decoder,
                &sweep,
                cfg.stop,
                seed,
                &cfg.options,
                workers.unwrap_or(0),
            )?;
            report.config = serde_json::json!({ "run": cfg, "simulation": report.config });
            eprint!("{}", report.summary());
            match out.or_else(|| cfg.out.as_ref().map(|o| dir.join(o))) {
                Some(path) => report.write(&path)?,
                None => print!("{}", report.to_csv()),
            }
        }
        Command::De { base, config, out } => {
            let cfg: DeRunConfig = match &config {
                Some(p) => read_json(p)?,
                None => DeRunConfig::default(),
            };
            let b = BaseMatrix::read(&base)?;
            let json = pool(workers)?.install(|| -> Result<serde_json::Value> {
                Ok(match cfg.es_n0_db {
                    Some(snr) => serde_json::json!({
                        "es_n0_db": snr,
                        "error_trace": de_trace(&b, snr, &cfg.de)?,
                        "config": cfg,
                    }),
                    None => {
                        let t = de_threshold(&b, &cfg.de, &cfg.search)?;
                        println!("threshold {t:.4} dB");
                        serde_json::json!({ "threshold_db": t, "config": cfg })
                    }
                })
            })?;
            emit(out.as_deref(), &serde_json::to_string_pretty(&json)?)?;
        }
        Command::Optimize { base, config, seed, out } => {
            let mut cfg: OptimizeConfig = match &config {
                Some(p) => read_json(p)?,
                None => OptimizeConfig::default(),
            };
            cfg.ga.seed = seed;
            let b = BaseMatrix::read(&base)?;
            let log_path = out.with_extension("jsonl");
            let result = pool(workers)?.install(|| -> Result<_> {
                let start_db = match cfg.start_db {
                    Some(s) => s,
                    None => de_threshold(&b, &cfg.de, &cfg.search)?,
                };
                let schedule = SnrSchedule {
                    start_db,
                    step_db: cfg.step_db,
                };
                let mut log = std::fs::File::create(&log_path)?;
                optimize(&b, &cfg.ga, &schedule, &cfg.de, Some(&mut log))
            })?;
            result.best.write(&out)?;
            let json = serde_json::json!({
                "best_snr_db": result.best_snr_db,
                "generations": result.history.len(),
                "out": out,
                "log": log_path,
            });
            println!("{}", serde_json::to_string_pretty(&json)?);
        }
        Command::Analyze { path, out, spc } => {
            let code = load_code(&path, kind(spc))?;
            emit(out.as_deref(), &serde_json::to_string_pretty(&analyze(&code))?)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_points() {
        let s = Sweep {
            start_db: 0.0,
            stop_db: 1.0,
            step_db: 0.25,
        };
        assert_eq!(s.points().unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let bad = Sweep { step_db: 0.0, ..s };
        assert!(bad.points().is_err());
    }

    #[test]
    fn run_config_rejects_unknown_keys() {
        let ok = r#"{"code":"c.base","decoder":{"algorithm":"MS_CW"},"sweep":{"start_db":0,"stop_db":1,"step_db":0.5}}"#;
        let cfg: RunConfig = serde_json::from_str(ok).unwrap();
        assert_eq!(cfg.stop, StopRule::default());
        let bad = r#"{"code":"c.base","decoder":{"algorithm":"MS_CW"},"sweep":{"start_db":0,"stop_db":1,"step_db":0.5},"extra":1}"#;
        assert!(serde_json::from_str::<RunConfig>(bad).is_err());
        let nested = r#"{"code":"c.base","decoder":{"algorithm":"MS_CW","iters":3},"sweep":{"start_db":0,"stop_db":1,"step_db":0.5}}"#;
        assert!(serde_json::from_str::<RunConfig>(nested).is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_from(["cwgldpc", "simulate", "--config", "x.json"]), 2);
        assert_eq!(run_from(["cwgldpc", "frobnicate"]), 2);
    }
}
