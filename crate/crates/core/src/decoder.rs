//! Iterative message-passing decoding.
//!
//! Variable nodes behave as in ordinary LDPC decoding. Check nodes run one of
//! the component-code rules from [`crate::component`] (CW-GLDPC codes) or the
//! usual single-parity-check rules (plain LDPC codes and the latent-variable
//! form of a CW-GLDPC code).
//!
//! The decoder keeps an a-posteriori LLR per variable and one check-to-variable
//! message per edge. A layer is a group of check nodes updated from the same
//! a-posteriori snapshot:
//!
//! ```text
//! v2c[e]  = app[v] - c2v[e]
//! new[e]  = clamp(alpha * rule(v2c over the check's edges))
//! app[v] += new[e] - c2v[e]     (after the whole layer)
//! ```
//!
//! Flooding is the special case of a single layer holding every check.

use serde::{Deserialize, Serialize};

use crate::component::{boxplus, ComponentCode, SpScratch};
use crate::error::{Error, Result};
use crate::gldpc::{CheckKind, LiftedCode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    /// Sum-product: Hartmann-Rudolph rule on CW checks, tanh rule on SPC checks.
    #[serde(rename = "SP_HR")]
    SpHr,
    /// Two-hypothesis min-sum rule on CW checks.
    #[serde(rename = "MS_CW")]
    MsCw,
    /// Normalized min-sum on single parity checks.
    #[serde(rename = "NMS_SPC")]
    NmsSpc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    Flooding,
    Layered,
}

/// How the CW min-sum rule is evaluated. Both forms give the same extrinsics.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MinSumForm {
    /// `max{a+b, 0} − max{b, a}` over the two competing hypotheses.
    #[default]
    TwoHypothesis,
    /// `sgn(a)·sgn(b)·min(|a|,|b|)` through the latent variable.
    LatentGraph,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "RawDecoderConfig")]
pub struct DecoderConfig {
    pub algorithm: Algorithm,
    pub schedule: Schedule,
    pub max_iters: usize,
    /// Extrinsic scaling applied to every check-node output.
    pub alpha: f64,
    /// Decode the latent-variable parity-check matrix as a plain LDPC code.
    pub latent_mode: bool,
    pub llr_clamp: f64,
    pub min_sum_form: MinSumForm,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDecoderConfig {
    algorithm: Algorithm,
    #[serde(default = "default_schedule")]
    schedule: Schedule,
    #[serde(default = "default_iters")]
    max_iters: usize,
    #[serde(default)]
    alpha: Option<f64>,
    #[serde(default)]
    latent_mode: bool,
    #[serde(default = "default_clamp")]
    llr_clamp: f64,
    #[serde(default)]
    min_sum_form: MinSumForm,
}

fn default_schedule() -> Schedule {
    Schedule::Layered
}

fn default_iters() -> usize {
    50
}

fn default_clamp() -> f64 {
    50.0
}

impl From<RawDecoderConfig> for DecoderConfig {
    fn from(r: RawDecoderConfig) -> Self {
        DecoderConfig {
            alpha: r.alpha.unwrap_or_else(|| Algorithm::default_alpha(r.algorithm)),
            algorithm: r.algorithm,
            schedule: r.schedule,
            max_iters: r.max_iters,
            latent_mode: r.latent_mode,
            llr_clamp: r.llr_clamp,
            min_sum_form: r.min_sum_form,
        }
    }
}

impl Algorithm {
    /// 1 for sum-product, 0.75 for the min-sum variants.
    pub fn default_alpha(self) -> f64 {
        match self {
            Algorithm::SpHr => 1.0,
            Algorithm::MsCw | Algorithm::NmsSpc => 0.75,
        }
    }
}

impl DecoderConfig {
    pub fn new(algorithm: Algorithm, schedule: Schedule, max_iters: usize) -> Self {
        DecoderConfig {
            algorithm,
            schedule,
            max_iters,
            alpha: algorithm.default_alpha(),
            latent_mode: false,
            llr_clamp: default_clamp(),
            min_sum_form: MinSumForm::default(),
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_latent_mode(mut self, on: bool) -> Self {
        self.latent_mode = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidConfig(format!("alpha {} outside (0, 1]", self.alpha)));
        }
        if !(self.llr_clamp > 0.0) {
            return Err(Error::InvalidConfig("llr_clamp must be positive".into()));
        }
        Ok(())
    }
}

impl Default for DecoderConfig {
    fn default() -> Self {
        DecoderConfig::new(Algorithm::MsCw, Schedule::Layered, 50)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeResult {
    pub hard_bits: Vec<u8>,
    pub app_llrs: Vec<f64>,
    pub iterations_used: usize,
    pub converged: bool,
    /// Bit errors after each iteration, when the transmitted word was supplied.
    pub error_trace: Option<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Rule {
    SpCw,
    MsCw(MinSumForm),
    SpSpc,
    MsSpc,
}

/// Reusable decoder bound to one code.
///
/// Holds all message buffers, so one instance should be used per thread.
#[derive(Clone, Debug)]
pub struct Decoder {
    cfg: DecoderConfig,
    rule: Rule,
    /// Output length (variables of the original code).
    n: usize,
    /// Variables in the decoding graph, latent ones included.
    n_graph: usize,
    offsets: Vec<usize>,
    edge_vars: Vec<usize>,
    cn_codes: Vec<ComponentCode>,
    layers: Vec<std::ops::Range<usize>>,
    /// Rows of the original parity-check matrix, for the stopping test.
    parity_rows: Vec<Vec<usize>>,
    c2v: Vec<f64>,
    fresh: Vec<f64>,
    v2c: Vec<f64>,
    app: Vec<f64>,
    hard: Vec<u8>,
    sp: SpScratch,
}

impl Decoder {
    pub fn new(code: &LiftedCode, cfg: &DecoderConfig) -> Result<Self> {
        cfg.validate()?;
        let latent;
        let graph = if cfg.latent_mode {
            if code.kind() != CheckKind::CwDual {
                return Err(Error::ConfigMismatch("latent mode needs a CW-GLDPC code".into()));
            }
            latent = code.latent_code()?;
            &latent
        } else {
            code
        };
        let rule = match (cfg.algorithm, graph.kind()) {
            (Algorithm::SpHr, CheckKind::CwDual) => Rule::SpCw,
            (Algorithm::SpHr, CheckKind::Spc) => Rule::SpSpc,
            (Algorithm::MsCw, CheckKind::CwDual) => Rule::MsCw(cfg.min_sum_form),
            (Algorithm::NmsSpc, CheckKind::Spc) => Rule::MsSpc,
            // the latent form of a CW code is decoded by plain min-sum
            (Algorithm::MsCw, CheckKind::Spc) if cfg.latent_mode => Rule::MsSpc,
            (Algorithm::MsCw, CheckKind::Spc) => {
                return Err(Error::ConfigMismatch("MS_CW requires CW-dual check nodes".into()))
            }
            (Algorithm::NmsSpc, CheckKind::CwDual) => {
                return Err(Error::ConfigMismatch(
                    "NMS_SPC on CW-dual check nodes requires latent_mode".into(),
                ))
            }
        };

        let mut offsets = Vec::with_capacity(graph.m() + 1);
        let mut edge_vars = Vec::new();
        offsets.push(0);
        for vars in graph.checks() {
            edge_vars.extend_from_slice(vars);
            offsets.push(edge_vars.len());
        }
        let e = edge_vars.len();
        Ok(Decoder {
            cfg: cfg.clone(),
            rule,
            n: code.n(),
            n_graph: graph.n(),
            offsets,
            edge_vars,
            cn_codes: graph.cn_codes().to_vec(),
            layers: match cfg.schedule {
                Schedule::Layered => graph.layers().to_vec(),
                Schedule::Flooding => vec![0..graph.m()],
            },
            parity_rows: code.h().row_lists(),
            c2v: vec![0.0; e],
            fresh: vec![0.0; e],
            v2c: vec![0.0; e],
            app: vec![0.0; graph.n()],
            hard: vec![0; code.n()],
            sp: SpScratch::default(),
        })
    }

    pub fn config(&self) -> &DecoderConfig {
        &self.cfg
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn decode(&mut self, channel: &[f64]) -> Result<DecodeResult> {
        self.run(channel, None)
    }

    /// Decodes while recording bit errors against `truth` after each iteration.
    /// Stopping still depends only on the syndrome.
    pub fn decode_traced(&mut self, channel: &[f64], truth: &[u8]) -> Result<DecodeResult> {
        if truth.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: truth.len(),
            });
        }
        self.run(channel, Some(truth))
    }

    fn run(&mut self, channel: &[f64], truth: Option<&[u8]>) -> Result<DecodeResult> {
        if channel.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: channel.len(),
            });
        }
        let clamp = self.cfg.llr_clamp;
        self.app[..self.n]
            .iter_mut()
            .zip(channel)
            .for_each(|(a, &l)| *a = l.clamp(-clamp, clamp));
        self.app[self.n..].fill(0.0);
        self.c2v.fill(0.0);

        let mut trace = truth.map(|_| Vec::with_capacity(self.cfg.max_iters));
        let mut converged = false;
        let mut iterations = 0;
        while iterations < self.cfg.max_iters {
            iterations += 1;
            for li in 0..self.layers.len() {
                self.update_layer(li);
            }
            self.harden();
            if let (Some(t), Some(truth)) = (trace.as_mut(), truth) {
                t.push(self.hard.iter().zip(truth).filter(|(a, b)| a != b).count());
            }
            if self.syndrome_zero() {
                converged = true;
                break;
            }
        }
        Ok(DecodeResult {
            hard_bits: self.hard.clone(),
            app_llrs: self.app[..self.n].to_vec(),
            iterations_used: iterations,
            converged,
            error_trace: trace,
        })
    }

    fn update_layer(&mut self, li: usize) {
        let clamp = self.cfg.llr_clamp;
        let alpha = self.cfg.alpha;
        let checks = self.layers[li].clone();
        for j in checks.clone() {
            let (lo, hi) = (self.offsets[j], self.offsets[j + 1]);
            for e in lo..hi {
                self.v2c[e] = (self.app[self.edge_vars[e]] - self.c2v[e]).clamp(-clamp, clamp);
            }
            let input = &self.v2c[lo..hi];
            let out = &mut self.fresh[lo..hi];
            match self.rule {
                Rule::SpCw => self.cn_codes[j].sp_extrinsic_into(input, out, &mut self.sp),
                Rule::MsCw(MinSumForm::TwoHypothesis) => self.cn_codes[j].ms_extrinsic_into(input, out),
                Rule::MsCw(MinSumForm::LatentGraph) => self.cn_codes[j].latent_extrinsic_into(input, out),
                Rule::SpSpc => spc_sum_product(input, out, &mut self.sp),
                Rule::MsSpc => spc_min_sum(input, out),
            }
            for x in out.iter_mut() {
                *x = (alpha * *x).clamp(-clamp, clamp);
            }
        }
        for e in self.offsets[checks.start]..self.offsets[checks.end] {
            self.app[self.edge_vars[e]] += self.fresh[e] - self.c2v[e];
            self.c2v[e] = self.fresh[e];
        }
    }

    fn harden(&mut self) {
        for (h, &a) in self.hard.iter_mut().zip(&self.app) {
            *h = (a < 0.0) as u8;
        }
    }

    fn syndrome_zero(&self) -> bool {
        self.parity_rows
            .iter()
            .all(|row| row.iter().fold(0u8, |p, &v| p ^ self.hard[v]) == 0)
    }

    /// Variables in the decoding graph (exceeds `n` in latent mode).
    pub fn graph_len(&self) -> usize {
        self.n_graph
    }
}

/// Single parity check, min-sum.
fn spc_min_sum(l: &[f64], out: &mut [f64]) {
    let mut negative = false;
    let (mut min1, mut min2, mut arg) = (f64::INFINITY, f64::INFINITY, usize::MAX);
    for (i, &x) in l.iter().enumerate() {
        negative ^= x < 0.0;
        let m = x.abs();
        if m < min1 {
            min2 = min1;
            min1 = m;
            arg = i;
        } else if m < min2 {
            min2 = m;
        }
    }
    for (i, (o, &x)) in out.iter_mut().zip(l).enumerate() {
        let m = if i == arg { min2 } else { min1 };
        *o = if negative ^ (x < 0.0) { -m } else { m };
    }
}

/// Single parity check, exact tanh rule via forward/backward boxplus.
fn spc_sum_product(l: &[f64], out: &mut [f64], scratch: &mut SpScratch) {
    let d = l.len();
    let fwd = &mut scratch.prefix;
    fwd.clear();
    fwd.push(f64::INFINITY);
    for &x in l {
        let last = *fwd.last().unwrap();
        fwd.push(boxplus(last, x));
    }
    let mut back = f64::INFINITY;
    for i in (0..d).rev() {
        out[i] = boxplus(fwd[i], back);
        back = boxplus(back, l[i]);
    }
}

/// Decodes one frame with a fresh decoder.
pub fn decode(code: &LiftedCode, channel_llrs: &[f64], cfg: &DecoderConfig) -> Result<DecodeResult> {
    Decoder::new(code, cfg)?.decode(channel_llrs)
}

/// Decodes the latent-variable form of `code` as a plain LDPC code whose
/// latent variables are punctured. The result covers the original `N` bits.
pub fn decode_latent_baseline(code: &LiftedCode, channel_llrs: &[f64], cfg: &DecoderConfig) -> Result<DecodeResult> {
    decode(code, channel_llrs, &cfg.clone().with_latent_mode(true))
}

/// True iff `hard_bits` satisfies every check of `code`.
pub fn syndrome_ok(code: &LiftedCode, hard_bits: &[u8]) -> bool {
    crate::gf2::syndrome(code.h(), hard_bits).is_ok_and(|s| s.iter().all(|&b| b == 0))
}
