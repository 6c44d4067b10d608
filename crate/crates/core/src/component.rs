//! Component codes: duals of Cordaro-Wagner codes.
//!
//! The parity-check matrix of a component code has two rows and every column
//! is one of the three nonzero height-2 patterns:
//!
//! ```text
//!   X: (0,1)ᵀ    Y: (1,0)ᵀ    Z: (1,1)ᵀ
//! ```
//!
//! A word is a codeword iff the parities over the X, Y and Z positions are all
//! equal. That common parity is the latent bit `v` of the constraint.
//!
//! All LLRs use the convention `L = ln μ(0)/μ(1)`, so positive favors bit 0.
//! The constraint-node rules here return extrinsic values `L̂ - L` without any
//! scaling; the decoder applies its scaling factor.

use crate::error::{Error, Result};
use crate::gf2::BinMatrix;

/// Saturation magnitude for LLRs that are formally infinite.
pub const SAT: f64 = 1e6;

/// Longest code the exhaustive oracles will enumerate.
pub const ORACLE_MAX_LEN: usize = 20;

/// Column pattern of one component-code position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ColumnType {
    X,
    Y,
    Z,
}

impl ColumnType {
    pub const ALL: [ColumnType; 3] = [ColumnType::X, ColumnType::Y, ColumnType::Z];

    /// The column of the two-row parity-check matrix, top row first.
    pub fn column(self) -> [u8; 2] {
        match self {
            ColumnType::X => [0, 1],
            ColumnType::Y => [1, 0],
            ColumnType::Z => [1, 1],
        }
    }

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    /// Type of position `i` (0-based) in the periodic prefix X Y Z X Y Z ...
    #[inline]
    pub fn canonical(i: usize) -> Self {
        Self::ALL[i % 3]
    }
}

/// A component code given by the column type of each position.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ComponentCode {
    types: Vec<ColumnType>,
    parts: [Vec<usize>; 3],
}

impl ComponentCode {
    /// First `n` columns of the periodic matrix `[b1 b2 b3 b1 b2 b3 ...]`.
    pub fn canonical(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::TooShort(n));
        }
        Self::from_types((0..n).map(ColumnType::canonical).collect())
    }

    /// Arbitrary column assignment; all three types must occur.
    pub fn from_types(types: Vec<ColumnType>) -> Result<Self> {
        let mut parts: [Vec<usize>; 3] = Default::default();
        for (i, t) in types.iter().enumerate() {
            parts[t.index()].push(i);
        }
        if types.len() < 3 || parts.iter().any(Vec::is_empty) {
            return Err(Error::TooShort(types.len()));
        }
        Ok(ComponentCode { types, parts })
    }

    pub fn n(&self) -> usize {
        self.types.len()
    }

    pub fn types(&self) -> &[ColumnType] {
        &self.types
    }

    pub fn column_type(&self, i: usize) -> ColumnType {
        self.types[i]
    }

    pub fn part(&self, t: ColumnType) -> &[usize] {
        &self.parts[t.index()]
    }

    pub fn part_x(&self) -> &[usize] {
        self.part(ColumnType::X)
    }

    pub fn part_y(&self) -> &[usize] {
        self.part(ColumnType::Y)
    }

    pub fn part_z(&self) -> &[usize] {
        self.part(ColumnType::Z)
    }

    /// The 2×n parity-check matrix.
    pub fn pcm(&self) -> BinMatrix {
        let mut h = BinMatrix::zeros(2, self.n());
        for (i, t) in self.types.iter().enumerate() {
            let [top, bottom] = t.column();
            h.set(0, i, top == 1);
            h.set(1, i, bottom == 1);
        }
        h
    }

    pub fn is_codeword(&self, c: &[u8]) -> bool {
        let par = |t: ColumnType| self.part(t).iter().fold(0u8, |p, &i| p ^ (c[i] & 1));
        let x = par(ColumnType::X);
        x == par(ColumnType::Y) && x == par(ColumnType::Z)
    }

    /// Number of weight-2 codewords, `C(|X|,2) + C(|Y|,2) + C(|Z|,2)`.
    pub fn weight2_count(&self) -> usize {
        self.parts.iter().map(|p| p.len() * p.len().saturating_sub(1) / 2).sum()
    }

    fn check_len(&self, l: &[f64]) -> Result<()> {
        if l.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: l.len(),
            });
        }
        Ok(())
    }

    /// All codewords as bitmasks (bit `i` is position `i`).
    pub fn codewords(&self) -> Result<Vec<u32>> {
        let n = self.n();
        if n > ORACLE_MAX_LEN {
            return Err(Error::TooLarge(n));
        }
        let mask = |t: ColumnType| self.part(t).iter().fold(0u32, |m, &i| m | (1 << i));
        let (mx, my, mz) = (mask(ColumnType::X), mask(ColumnType::Y), mask(ColumnType::Z));
        Ok((0..1u32 << n)
            .filter(|&w| {
                let px = (w & mx).count_ones() & 1;
                px == (w & my).count_ones() & 1 && px == (w & mz).count_ones() & 1
            })
            .collect())
    }

    /// Exhaustive bitwise MAP: `L̂_i = ln σ_{i,0}/σ_{i,1}` summed over all codewords.
    pub fn map_oracle(&self, l: &[f64]) -> Result<Vec<f64>> {
        self.check_len(l)?;
        let words = self.codewords()?;
        let metrics = log_metrics(&words, l);
        Ok((0..self.n())
            .map(|i| {
                let (zero, one) = split_by_bit(&words, &metrics, i);
                log_sum_exp(&zero) - log_sum_exp(&one)
            })
            .collect())
    }

    /// Exhaustive max-product: best codeword with `c_i = 0` against best with `c_i = 1`.
    pub fn max_oracle(&self, l: &[f64]) -> Result<Vec<f64>> {
        self.check_len(l)?;
        let words = self.codewords()?;
        let metrics = log_metrics(&words, l);
        let max = |v: Vec<f64>| v.into_iter().fold(f64::NEG_INFINITY, f64::max);
        Ok((0..self.n())
            .map(|i| {
                let (zero, one) = split_by_bit(&words, &metrics, i);
                max(zero) - max(one)
            })
            .collect())
    }

    /// Hartmann-Rudolph (sum-product) extrinsic.
    pub fn cn_update_sp(&self, l: &[f64]) -> Result<Vec<f64>> {
        self.check_len(l)?;
        let mut out = vec![0.0; self.n()];
        self.sp_extrinsic_into(l, &mut out, &mut SpScratch::default());
        Ok(out)
    }

    /// Two-hypothesis min-sum extrinsic.
    pub fn cn_update_ms(&self, l: &[f64]) -> Result<Vec<f64>> {
        self.check_len(l)?;
        let mut out = vec![0.0; self.n()];
        self.ms_extrinsic_into(l, &mut out);
        Ok(out)
    }

    /// Min-sum extrinsic computed through the latent-variable factor graph.
    pub fn cn_update_ms_latent(&self, l: &[f64]) -> Result<Vec<f64>> {
        self.check_len(l)?;
        let mut out = vec![0.0; self.n()];
        self.latent_extrinsic_into(l, &mut out);
        Ok(out)
    }

    /// Sum-product kernel.
    ///
    /// For `i` in set `S` with the other two sets `A` and `B`,
    /// `E_i = 2·atanh[φ_{S∖i} · tanh(atanh φ_A + atanh φ_B)]` where
    /// `φ_T = ∏_{j∈T} tanh(L_j/2)`. Writing `Λ_T = 2·atanh φ_T` this is
    /// `Λ_{S∖i} ⊞ (Λ_A + Λ_B)`, which [`boxplus`] evaluates without forming
    /// `tanh` products near ±1.
    pub fn sp_extrinsic_into(&self, l: &[f64], out: &mut [f64], scratch: &mut SpScratch) {
        let mut full = [0.0f64; 3];
        for t in ColumnType::ALL {
            full[t.index()] = self.part(t).iter().fold(f64::INFINITY, |acc, &j| boxplus(acc, l[j]));
        }
        for t in ColumnType::ALL {
            let part = self.part(t);
            let others = latent_input(&full, t);
            // prefix[k] combines part[..k], suffix[k] combines part[k..]
            let d = part.len();
            scratch.prefix.clear();
            scratch.prefix.push(f64::INFINITY);
            for &j in part {
                let last = *scratch.prefix.last().unwrap();
                scratch.prefix.push(boxplus(last, l[j]));
            }
            scratch.suffix.clear();
            scratch.suffix.resize(d + 1, f64::INFINITY);
            for k in (0..d).rev() {
                scratch.suffix[k] = boxplus(scratch.suffix[k + 1], l[part[k]]);
            }
            for (k, &i) in part.iter().enumerate() {
                let own = boxplus(scratch.prefix[k], scratch.suffix[k + 1]);
                out[i] = boxplus(own, others);
            }
        }
    }

    /// Min-sum kernel.
    ///
    /// With `a = L̃_S^(i)` (sign product times minimum magnitude over `S∖i`)
    /// and `b = L̃_A + L̃_B` over the two other full sets,
    /// `E_i = max{a + b, 0} − max{b, a}`. When `S∖i` is empty `a` is
    /// infinite and the rule reduces to `E_i = b`.
    pub fn ms_extrinsic_into(&self, l: &[f64], out: &mut [f64]) {
        let stats = self.set_stats(l);
        let full = stats.map(|s| s.full());
        for t in ColumnType::ALL {
            let b = latent_input(&full, t);
            for &i in self.part(t) {
                out[i] = match stats[t.index()].excluding(i, l[i]) {
                    Some(a) => two_hypothesis(a, b),
                    None => b,
                };
            }
        }
    }

    /// Latent-graph min-sum kernel: `E'_i = sgn(a)·sgn(b)·min{|a|, |b|}`.
    pub fn latent_extrinsic_into(&self, l: &[f64], out: &mut [f64]) {
        let stats = self.set_stats(l);
        let full = stats.map(|s| s.full());
        for t in ColumnType::ALL {
            let b = latent_input(&full, t);
            for &i in self.part(t) {
                out[i] = match stats[t.index()].excluding(i, l[i]) {
                    Some(a) => min_sum(a, b),
                    None => b,
                };
            }
        }
    }

    fn set_stats(&self, l: &[f64]) -> [SetStats; 3] {
        ColumnType::ALL.map(|t| SetStats::new(self.part(t), l))
    }
}

/// `max(a + b, 0) − max(a, b)`, with the rounding error of `a + b` carried
/// through (TwoSum) so cancellation does not cost precision.
#[inline]
fn two_hypothesis(a: f64, b: f64) -> f64 {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    if s > 0.0 {
        (s - b.max(a)) + err
    } else {
        0.0 - b.max(a)
    }
}

/// Message from the latent variable towards set `t`: the sum of the other two sets.
#[inline]
fn latent_input(full: &[f64; 3], t: ColumnType) -> f64 {
    match t {
        ColumnType::X => full[1] + full[2],
        ColumnType::Y => full[0] + full[2],
        ColumnType::Z => full[0] + full[1],
    }
}

/// Sign-parity and two smallest magnitudes over one set.
#[derive(Clone, Copy, Debug)]
struct SetStats {
    negative: bool,
    min1: f64,
    min2: f64,
    argmin: usize,
}

impl SetStats {
    fn new(part: &[usize], l: &[f64]) -> Self {
        let mut s = SetStats {
            negative: false,
            min1: f64::INFINITY,
            min2: f64::INFINITY,
            argmin: usize::MAX,
        };
        for &j in part {
            s.negative ^= l[j] < 0.0;
            let m = l[j].abs();
            if m < s.min1 {
                s.min2 = s.min1;
                s.min1 = m;
                s.argmin = j;
            } else if m < s.min2 {
                s.min2 = m;
            }
        }
        s
    }

    fn full(&self) -> f64 {
        if self.negative {
            -self.min1
        } else {
            self.min1
        }
    }

    /// `L̃` over the set without position `i`; `None` when nothing remains.
    fn excluding(&self, i: usize, li: f64) -> Option<f64> {
        let m = if i == self.argmin { self.min2 } else { self.min1 };
        if m.is_infinite() {
            return None;
        }
        Some(if self.negative ^ (li < 0.0) { -m } else { m })
    }
}

/// Two-input min-sum: `sgn(a)·sgn(b)·min(|a|,|b|)` with `sgn(0) = +1`.
#[inline]
pub fn min_sum(a: f64, b: f64) -> f64 {
    let m = a.abs().min(b.abs());
    if (a < 0.0) != (b < 0.0) {
        -m
    } else {
        m
    }
}

/// Exact two-input check-node combination `2·atanh(tanh(a/2)·tanh(b/2))`.
///
/// Evaluated as `sgn(a)sgn(b)·min(|a|,|b|) + ln(1+e^{-|a+b|}) − ln(1+e^{-|a−b|})`,
/// which stays accurate for large magnitudes and accepts `±∞`.
#[inline]
pub fn boxplus(a: f64, b: f64) -> f64 {
    if a.is_infinite() {
        return if a > 0.0 { b } else { -b };
    }
    if b.is_infinite() {
        return if b > 0.0 { a } else { -a };
    }
    min_sum(a, b) + (-(a + b).abs()).exp().ln_1p() - (-(a - b).abs()).exp().ln_1p()
}

/// Reusable buffers for [`ComponentCode::sp_extrinsic_into`].
#[derive(Clone, Debug, Default)]
pub struct SpScratch {
    pub(crate) prefix: Vec<f64>,
    suffix: Vec<f64>,
}

fn log_metrics(words: &[u32], l: &[f64]) -> Vec<f64> {
    words
        .iter()
        .map(|&w| {
            l.iter()
                .enumerate()
                .map(|(j, &lj)| if (w >> j) & 1 == 1 { -0.5 * lj } else { 0.5 * lj })
                .sum()
        })
        .collect()
}

fn split_by_bit(words: &[u32], metrics: &[f64], i: usize) -> (Vec<f64>, Vec<f64>) {
    let mut zero = Vec::with_capacity(words.len() / 2);
    let mut one = Vec::with_capacity(words.len() / 2);
    for (&w, &m) in words.iter().zip(metrics) {
        if (w >> i) & 1 == 1 {
            one.push(m);
        } else {
            zero.push(m);
        }
    }
    (zero, one)
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m.is_infinite() {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_llrs(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        (0..n).map(|_| rng.random_range(-10.0..10.0)).collect()
    }

    fn one_based(v: &[usize]) -> Vec<usize> {
        v.iter().map(|i| i + 1).collect()
    }

    #[test]
    fn canonical_partitions() {
        let c = ComponentCode::canonical(9).unwrap();
        assert_eq!(one_based(c.part_x()), vec![1, 4, 7]);
        assert_eq!(one_based(c.part_y()), vec![2, 5, 8]);
        assert_eq!(one_based(c.part_z()), vec![3, 6, 9]);

        let c = ComponentCode::canonical(3).unwrap();
        assert_eq!((c.part_x(), c.part_y(), c.part_z()), (&[0][..], &[1][..], &[2][..]));

        let c = ComponentCode::canonical(4).unwrap();
        assert_eq!(one_based(c.part_x()), vec![1, 4]);
        assert_eq!(one_based(c.part_y()), vec![2]);
        assert_eq!(one_based(c.part_z()), vec![3]);

        assert!(matches!(ComponentCode::canonical(2), Err(Error::TooShort(2))));
    }

    #[test]
    fn canonical_pcm_is_h9() {
        let h = ComponentCode::canonical(9).unwrap().pcm();
        let expected = BinMatrix::from_rows(&[
            [0u8, 1, 1, 0, 1, 1, 0, 1, 1],
            [1, 0, 1, 1, 0, 1, 1, 0, 1],
        ])
        .unwrap();
        assert_eq!(h, expected);
    }

    #[test]
    fn canonical_is_balanced() {
        for n in 3..60 {
            let c = ComponentCode::canonical(n).unwrap();
            let (x, y, z) = (c.part_x().len(), c.part_y().len(), c.part_z().len());
            assert!(x - z <= 1 && y - z <= 1 && x >= y);
            assert_eq!(x + y + z, n);
        }
    }

    fn weight2_by_enumeration(c: &ComponentCode) -> usize {
        c.codewords().unwrap().iter().filter(|w| w.count_ones() == 2).count()
    }

    #[test]
    fn weight2_examples() {
        assert_eq!(ComponentCode::canonical(9).unwrap().weight2_count(), 9);
        assert_eq!(ComponentCode::canonical(3).unwrap().weight2_count(), 0);
        let sized = ComponentCode::from_types(
            [ColumnType::X; 4]
                .into_iter()
                .chain([ColumnType::Y; 3])
                .chain([ColumnType::Z; 3])
                .collect(),
        )
        .unwrap();
        assert_eq!(sized.weight2_count(), 12);
        assert_eq!(weight2_by_enumeration(&sized), 12);
    }

    #[test]
    fn weight2_matches_enumeration() {
        for n in 3..=14 {
            let c = ComponentCode::canonical(n).unwrap();
            assert_eq!(c.weight2_count(), weight2_by_enumeration(&c), "n = {n}");
        }
    }

    #[test]
    fn codeword_parities_agree() {
        for n in 3..=12 {
            let c = ComponentCode::canonical(n).unwrap();
            let words = c.codewords().unwrap();
            assert_eq!(words.len(), 1 << (n - 2));
            let h = c.pcm();
            for w in words {
                let bits: Vec<u8> = (0..n).map(|i| ((w >> i) & 1) as u8).collect();
                assert!(c.is_codeword(&bits));
                assert!(crate::gf2::syndrome(&h, &bits).unwrap().iter().all(|&s| s == 0));
            }
        }
    }

    #[test]
    fn oracle_rejects_long_codes() {
        let c = ComponentCode::canonical(21).unwrap();
        assert!(matches!(c.map_oracle(&[0.0; 21]), Err(Error::TooLarge(21))));
        assert!(matches!(c.max_oracle(&[0.0; 21]), Err(Error::TooLarge(21))));
    }

    #[test]
    fn repetition_case_n3() {
        // H3 = [b1 b2 b3] has codewords {000, 111}.
        let c = ComponentCode::canonical(3).unwrap();
        let l = [5.0, 2.0, 3.0];
        let map = c.map_oracle(&l).unwrap();
        assert!((map[0] - 10.0).abs() < 1e-12);
        let sp = c.cn_update_sp(&l).unwrap();
        assert!((sp[0] - 5.0).abs() < 1e-12);
        let max = c.max_oracle(&l).unwrap();
        assert_eq!(max[0], 10.0);
        assert_eq!(c.cn_update_ms(&l).unwrap()[0], 5.0);
    }

    #[test]
    fn map_reinforces_strong_all_zero() {
        let c = ComponentCode::canonical(9).unwrap();
        let map = c.map_oracle(&[10.0; 9]).unwrap();
        assert!(map.iter().all(|&x| x > 10.0));
    }

    #[test]
    fn max_oracle_handles_zero_llr() {
        let c = ComponentCode::canonical(9).unwrap();
        let mut l = vec![1.5; 9];
        l[4] = 0.0;
        assert!(c.max_oracle(&l).unwrap().iter().all(|x| x.is_finite()));
    }

    #[test]
    fn sp_zero_in_y_collapses() {
        let c = ComponentCode::canonical(9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut l = random_llrs(&mut rng, 9);
        l[4] = 0.0; // position 5 is in Y
        let e = c.cn_update_sp(&l).unwrap();
        let phi = |idx: &[usize]| idx.iter().map(|&j| (l[j] / 2.0).tanh()).product::<f64>();
        for &i in c.part_x() {
            let rest: Vec<usize> = c.part_x().iter().copied().filter(|&j| j != i).collect();
            let expect = 2.0 * (phi(&rest) * phi(c.part_z())).atanh();
            assert!((e[i] - expect).abs() < 1e-9);
        }
    }

    #[test]
    fn sp_matches_literal_tanh_formula() {
        let c = ComponentCode::canonical(10).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let phi = |l: &[f64], idx: &mut dyn Iterator<Item = usize>| idx.map(|j| (l[j] / 2.0).tanh()).product::<f64>();
        for _ in 0..200 {
            let l: Vec<f64> = (0..10).map(|_| rng.random_range(-3.0..3.0)).collect();
            let e = c.cn_update_sp(&l).unwrap();
            for t in ColumnType::ALL {
                let others: Vec<ColumnType> = ColumnType::ALL.into_iter().filter(|&u| u != t).collect();
                let pa = phi(&l, &mut c.part(others[0]).iter().copied());
                let pb = phi(&l, &mut c.part(others[1]).iter().copied());
                for &i in c.part(t) {
                    let own = phi(&l, &mut c.part(t).iter().copied().filter(|&j| j != i));
                    let literal = 2.0 * (own * (pa.atanh() + pb.atanh()).tanh()).atanh();
                    assert!((e[i] - literal).abs() < 1e-9, "{} vs {}", e[i], literal);
                }
            }
        }
    }

    #[test]
    fn sp_matches_map_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n in [4, 9] {
            let c = ComponentCode::canonical(n).unwrap();
            for _ in 0..200 {
                let l = random_llrs(&mut rng, n);
                let map = c.map_oracle(&l).unwrap();
                let e = c.cn_update_sp(&l).unwrap();
                for i in 0..n {
                    assert!((e[i] - (map[i] - l[i])).abs() <= 1e-9);
                }
            }
        }
    }

    #[test]
    fn ms_matches_max_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let c = ComponentCode::canonical(9).unwrap();
        for _ in 0..500 {
            let l = random_llrs(&mut rng, 9);
            let max = c.max_oracle(&l).unwrap();
            let e = c.cn_update_ms(&l).unwrap();
            for i in 0..9 {
                assert!((e[i] - (max[i] - l[i])).abs() <= 1e-12);
            }
        }
    }

    // Direct evaluation of the min-sum and latent formulas on (L̃_X, L̃_Y, L̃_Z).
    fn eq_ms(a: f64, y: f64, z: f64) -> f64 {
        (a + y + z).max(0.0) - (y + z).max(a)
    }

    #[test]
    fn ms_formula_examples() {
        assert_eq!(eq_ms(2.0, 3.0, -1.0), 2.0);
        assert_eq!(min_sum(2.0, 3.0 + -1.0), 2.0);
        assert_eq!(min_sum(-5.0, 1.0), -1.0);
        for a in [-3.0, 0.0, 4.0] {
            assert_eq!(eq_ms(a, 1.5, -1.5), 0.0);
        }
    }

    #[test]
    fn ms_zero_latent_sum_gives_zero() {
        // X = {0,3,6}, Y = {1,4,7}, Z = {2,5,8}; L̃_Y = 2, L̃_Z = -2.
        let c = ComponentCode::canonical(9).unwrap();
        let l = [1.0, 2.0, -2.0, 4.0, 3.0, 5.0, -6.0, 7.0, 8.0];
        let e = c.cn_update_ms(&l).unwrap();
        for &i in c.part_x() {
            assert_eq!(e[i], 0.0);
        }
    }

    #[test]
    fn latent_equals_ms_exhaustive_small() {
        // Integer magnitudes make every operation exact.
        for n in 3..=5 {
            let c = ComponentCode::canonical(n).unwrap();
            let vals = n as i64 + 1;
            let total = (2 * vals as usize).pow(n as u32);
            for code in 0..total {
                let mut x = code;
                let l: Vec<f64> = (0..n)
                    .map(|_| {
                        let d = (x % (2 * vals as usize)) as i64;
                        x /= 2 * vals as usize;
                        let mag = (d / 2) as f64;
                        if d % 2 == 1 { -mag } else { mag }
                    })
                    .collect();
                assert_eq!(c.cn_update_ms(&l).unwrap(), c.cn_update_ms_latent(&l).unwrap(), "l = {l:?}");
            }
        }
    }

    #[test]
    fn boxplus_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let a: f64 = rng.random_range(-8.0..8.0);
            let b: f64 = rng.random_range(-8.0..8.0);
            let direct = 2.0 * ((a / 2.0).tanh() * (b / 2.0).tanh()).atanh();
            assert!((boxplus(a, b) - direct).abs() < 1e-10);
        }
        assert_eq!(boxplus(f64::INFINITY, -3.0), -3.0);
        assert_eq!(boxplus(0.0, 7.0), 0.0);
        assert!((boxplus(40.0, 45.0) - (40.0 - (-5.0f64).exp().ln_1p())).abs() < 1e-13);
    }

    fn rule_outputs(c: &ComponentCode, l: &[f64]) -> [Vec<f64>; 3] {
        [
            c.cn_update_sp(l).unwrap(),
            c.cn_update_ms(l).unwrap(),
            c.cn_update_ms_latent(l).unwrap(),
        ]
    }

    proptest! {
        #[test]
        fn codeword_sign_symmetry(n in 3usize..12, seed in any::<u64>(), word_pick in any::<u32>()) {
            let c = ComponentCode::canonical(n).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let l = random_llrs(&mut rng, n);
            let words = c.codewords().unwrap();
            let w = words[word_pick as usize % words.len()];
            let sign = |j: usize| if (w >> j) & 1 == 1 { -1.0 } else { 1.0 };
            let flipped: Vec<f64> = l.iter().enumerate().map(|(j, x)| sign(j) * x).collect();
            for (a, b) in rule_outputs(&c, &l).iter().zip(rule_outputs(&c, &flipped).iter()) {
                for j in 0..n {
                    prop_assert!((sign(j) * a[j] - b[j]).abs() <= 1e-12);
                }
            }
        }

        #[test]
        fn permutation_within_set_is_equivariant(n in 3usize..13, seed in any::<u64>(), set in 0usize..3) {
            let c = ComponentCode::canonical(n).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let l = random_llrs(&mut rng, n);
            let part = c.part(ColumnType::ALL[set]).to_vec();
            // rotate the positions of one set
            let mut perm: Vec<usize> = (0..n).collect();
            for k in 0..part.len() {
                perm[part[k]] = part[(k + 1) % part.len()];
            }
            let permuted: Vec<f64> = (0..n).map(|j| l[perm[j]]).collect();
            for (a, b) in rule_outputs(&c, &l).iter().zip(rule_outputs(&c, &permuted).iter()) {
                for j in 0..n {
                    prop_assert!((b[j] - a[perm[j]]).abs() <= 1e-12);
                }
            }
        }

        #[test]
        fn extrinsic_ignores_own_input(n in 3usize..12, seed in any::<u64>(), pos in any::<usize>(), delta in -20.0f64..20.0) {
            let c = ComponentCode::canonical(n).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let l = random_llrs(&mut rng, n);
            let i = pos % n;
            let mut perturbed = l.clone();
            perturbed[i] += delta;
            for (a, b) in rule_outputs(&c, &l).iter().zip(rule_outputs(&c, &perturbed).iter()) {
                prop_assert_eq!(a[i], b[i]);
            }
        }
    }
}
