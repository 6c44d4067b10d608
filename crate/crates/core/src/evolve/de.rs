//! Quantized density evolution on a protograph, flooding schedule.
//!
//! Every base-matrix entry with an edge is one proto-edge carrying one
//! variable-to-check and one check-to-variable density.

use serde::{Deserialize, Serialize};

use super::density::{Density, Grid};
use crate::component::ColumnType;
use crate::error::{Error, Result};
use crate::gldpc::{BaseMatrix, CheckKind};
use crate::simkit::ChannelSpec;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeConfig {
    pub delta: f64,
    pub l_max: f64,
    /// Extrinsic scaling applied to check-node outputs.
    pub alpha: f64,
    pub iters: usize,
    pub target_err: f64,
    pub check: CheckKind,
}

impl Default for DeConfig {
    fn default() -> Self {
        DeConfig {
            delta: 0.05,
            l_max: 30.0,
            alpha: 0.75,
            iters: 50,
            target_err: 1e-6,
            check: CheckKind::CwDual,
        }
    }
}

impl DeConfig {
    pub fn grid(&self) -> Grid {
        Grid::new(self.delta, self.l_max)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.l_max >= self.delta) {
            return Err(Error::InvalidConfig("need 0 < delta <= l_max".into()));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidConfig(format!("alpha {} outside (0, 1]", self.alpha)));
        }
        if !(self.target_err > 0.0 && self.target_err < 0.5) {
            return Err(Error::InvalidConfig("target_err must lie in (0, 0.5)".into()));
        }
        Ok(())
    }
}

/// Bisection bracket in dB.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Search {
    pub lo_db: f64,
    pub hi_db: f64,
    pub tol_db: f64,
}

impl Default for Search {
    fn default() -> Self {
        Search {
            lo_db: -5.0,
            hi_db: 10.0,
            tol_db: 0.01,
        }
    }
}

/// Output densities of a variable node: each edge gets the channel density
/// convolved with every other incoming density.
pub fn vn_output(channel: &Density, incoming: &[Density]) -> Vec<Density> {
    let d = incoming.len();
    // prefix[i] = channel ⊛ in[0..i], suffix[i] = in[i..d]
    let mut prefix = Vec::with_capacity(d + 1);
    prefix.push(channel.clone());
    for x in incoming {
        let next = prefix.last().unwrap().convolve(x);
        prefix.push(next);
    }
    let mut suffix: Vec<Option<Density>> = vec![None; d + 1];
    for i in (1..d).rev() {
        suffix[i] = Some(match &suffix[i + 1] {
            Some(s) => incoming[i].convolve(s),
            None => incoming[i].clone(),
        });
    }
    (0..d)
        .map(|i| match &suffix[i + 1] {
            Some(s) => prefix[i].convolve(s),
            None => prefix[i].clone(),
        })
        .collect()
}

/// A-posteriori density of a variable node.
pub fn vn_app(channel: &Density, incoming: &[Density]) -> Density {
    incoming.iter().fold(channel.clone(), |acc, x| acc.convolve(x))
}

/// Pairwise min-sum folds over `items`, excluding each one in turn.
fn min_sum_excluding(items: &[&Density]) -> (Option<Density>, Vec<Option<Density>>) {
    let d = items.len();
    let mut prefix: Vec<Option<Density>> = vec![None; d + 1];
    for i in 0..d {
        prefix[i + 1] = Some(match &prefix[i] {
            Some(p) => p.min_sum(items[i]),
            None => items[i].clone(),
        });
    }
    let mut suffix: Vec<Option<Density>> = vec![None; d + 1];
    for i in (0..d).rev() {
        suffix[i] = Some(match &suffix[i + 1] {
            Some(s) => items[i].min_sum(s),
            None => items[i].clone(),
        });
    }
    let excl = (0..d)
        .map(|i| match (&prefix[i], &suffix[i + 1]) {
            (Some(p), Some(s)) => Some(p.min_sum(s)),
            (Some(x), None) | (None, Some(x)) => Some(x.clone()),
            (None, None) => None,
        })
        .collect();
    (prefix[d].clone(), excl)
}

/// Output densities of a CW check node under the min-sum rule evaluated on
/// the latent graph.
///
/// Positions take the canonical X/Y/Z types. For an edge in set `S` with
/// other sets `A` and `B` the output is `α·ms(L̃_{S∖i}, L̃_A + L̃_B)`, where
/// `L̃_T` is the min-sum fold over `T`. An empty `S∖i` passes the latent sum
/// through unchanged.
pub fn cn_output_cw(incoming: &[Density], alpha: f64) -> Vec<Density> {
    let d = incoming.len();
    let mut parts: [Vec<usize>; 3] = Default::default();
    for i in 0..d {
        parts[ColumnType::canonical(i).index()].push(i);
    }
    let folds: Vec<(Option<Density>, Vec<Option<Density>>)> = parts
        .iter()
        .map(|p| min_sum_excluding(&p.iter().map(|&i| &incoming[i]).collect::<Vec<_>>()))
        .collect();
    let mut out: Vec<Option<Density>> = vec![None; d];
    for t in 0..3 {
        let (a, b) = ((t + 1) % 3, (t + 2) % 3);
        let latent = match (&folds[a].0, &folds[b].0) {
            (Some(x), Some(y)) => x.convolve(y),
            (Some(x), None) | (None, Some(x)) => x.clone(),
            (None, None) => continue,
        };
        for (k, &i) in parts[t].iter().enumerate() {
            let e = match &folds[t].1[k] {
                Some(own) => own.min_sum(&latent),
                None => latent.clone(),
            };
            out[i] = Some(e.scale(alpha));
        }
    }
    out.into_iter().map(|o| o.expect("every position belongs to a set")).collect()
}

/// Output densities of a single parity check under scaled min-sum.
pub fn cn_output_spc(incoming: &[Density], alpha: f64) -> Vec<Density> {
    let refs: Vec<&Density> = incoming.iter().collect();
    min_sum_excluding(&refs)
        .1
        .into_iter()
        .map(|e| e.expect("check degree at least two").scale(alpha))
        .collect()
}

/// Densities on every proto-edge of a protograph.
#[derive(Clone, Debug)]
pub struct ProtoState {
    cfg: DeConfig,
    /// Proto-edges per base row, in column order: `(col, edge)`.
    row_edges: Vec<Vec<(usize, usize)>>,
    /// Proto-edges per base column, in row order.
    col_edges: Vec<Vec<usize>>,
    punctured: Vec<bool>,
    channel: Vec<Density>,
    v2c: Vec<Density>,
    c2v: Vec<Density>,
    iteration: usize,
}

impl ProtoState {
    pub fn new(base: &BaseMatrix, es_n0_db: f64, cfg: &DeConfig) -> Result<Self> {
        cfg.validate()?;
        let min_degree = match cfg.check {
            CheckKind::CwDual => 3,
            CheckKind::Spc => 2,
        };
        let mut row_edges = vec![Vec::new(); base.rows()];
        let mut col_edges = vec![Vec::new(); base.cols()];
        let mut e = 0;
        for (r, edges) in row_edges.iter_mut().enumerate() {
            for (c, col) in col_edges.iter_mut().enumerate() {
                if base.has_edge(r, c) {
                    edges.push((c, e));
                    col.push(e);
                    e += 1;
                }
            }
            if edges.len() < min_degree {
                return Err(Error::DegenerateRow { node: r, degree: edges.len() });
            }
        }
        let grid = cfg.grid();
        let spec = ChannelSpec::new(es_n0_db);
        let m = spec.llr_mean();
        let live = Density::gaussian(grid, m, 2.0 * m);
        let punctured: Vec<bool> = (0..base.cols()).map(|c| base.is_punctured(c)).collect();
        let channel = punctured
            .iter()
            .map(|&p| if p { Density::zero(grid) } else { live.clone() })
            .collect();
        Ok(ProtoState {
            cfg: *cfg,
            row_edges,
            col_edges,
            punctured,
            channel,
            v2c: vec![Density::zero(grid); e],
            c2v: vec![Density::zero(grid); e],
            iteration: 0,
        })
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn v2c(&self, edge: usize) -> &Density {
        &self.v2c[edge]
    }

    pub fn c2v(&self, edge: usize) -> &Density {
        &self.c2v[edge]
    }

    /// Updates the variable-to-check densities leaving base column `c`.
    pub fn de_vn_update(&mut self, c: usize) {
        let edges = &self.col_edges[c];
        let incoming: Vec<Density> = edges.iter().map(|&e| self.c2v[e].clone()).collect();
        for (&e, d) in edges.iter().zip(vn_output(&self.channel[c], &incoming)) {
            self.v2c[e] = d;
        }
    }

    /// Updates the check-to-variable densities leaving base row `r`.
    pub fn de_cn_update(&mut self, r: usize) {
        let edges = &self.row_edges[r];
        let incoming: Vec<Density> = edges.iter().map(|&(_, e)| self.v2c[e].clone()).collect();
        let out = match self.cfg.check {
            CheckKind::CwDual => cn_output_cw(&incoming, self.cfg.alpha),
            CheckKind::Spc => cn_output_spc(&incoming, self.cfg.alpha),
        };
        for (&(_, e), d) in edges.iter().zip(out) {
            self.c2v[e] = d;
        }
    }

    /// One flooding iteration.
    pub fn iterate(&mut self) {
        for c in 0..self.col_edges.len() {
            self.de_vn_update(c);
        }
        for r in 0..self.row_edges.len() {
            self.de_cn_update(r);
        }
        self.iteration += 1;
    }

    /// Mean over transmitted proto-VNs of `P(APP < 0) + P(APP = 0)/2`.
    pub fn de_error_prob(&self) -> f64 {
        let mut total = 0.0;
        let mut count = 0;
        for (c, edges) in self.col_edges.iter().enumerate() {
            if self.punctured[c] {
                continue;
            }
            let incoming: Vec<Density> = edges.iter().map(|&e| self.c2v[e].clone()).collect();
            total += vn_app(&self.channel[c], &incoming).error_prob();
            count += 1;
        }
        if count == 0 {
            0.5
        } else {
            total / count as f64
        }
    }
}

/// Error probability after each iteration `0..=iters` (entry 0 is the channel).
pub fn de_trace(base: &BaseMatrix, es_n0_db: f64, cfg: &DeConfig) -> Result<Vec<f64>> {
    let mut state = ProtoState::new(base, es_n0_db, cfg)?;
    let mut trace = vec![state.de_error_prob()];
    for _ in 0..cfg.iters {
        state.iterate();
        trace.push(state.de_error_prob());
    }
    Ok(trace)
}

/// Error probability after `cfg.iters` iterations.
pub fn de_error_after(base: &BaseMatrix, es_n0_db: f64, cfg: &DeConfig) -> Result<f64> {
    let mut state = ProtoState::new(base, es_n0_db, cfg)?;
    for _ in 0..cfg.iters {
        state.iterate();
    }
    Ok(state.de_error_prob())
}

/// Smallest Es/N0 (within `tol_db`) at which the error probability after
/// `cfg.iters` iterations is at most `cfg.target_err`.
pub fn de_threshold(base: &BaseMatrix, cfg: &DeConfig, search: &Search) -> Result<f64> {
    threshold_by(search, |snr| Ok(de_error_after(base, snr, cfg)? <= cfg.target_err))
}

/// Bisection for the boundary of a predicate that holds at high SNR.
pub fn threshold_by(search: &Search, mut decodes: impl FnMut(f64) -> Result<bool>) -> Result<f64> {
    if !(search.lo_db < search.hi_db) || !(search.tol_db > 0.0) {
        return Err(Error::InvalidConfig("search needs lo_db < hi_db and tol_db > 0".into()));
    }
    let (mut lo, mut hi) = (search.lo_db, search.hi_db);
    if !decodes(hi)? {
        return Err(Error::NotBracketed(format!("no convergence at {hi} dB")));
    }
    if decodes(lo)? {
        return Err(Error::NotBracketed(format!("already converges at {lo} dB")));
    }
    while hi - lo > search.tol_db {
        let mid = 0.5 * (lo + hi);
        if decodes(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
