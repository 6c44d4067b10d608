//! Code construction: protograph base matrices, quasi-cyclic lifting and the
//! binary parity-check matrices of the resulting GLDPC codes.
//!
//! A lifted code has `M = rows·lift` constraint nodes and `N = cols·lift`
//! variable nodes. The adjacency matrix `Γ` (M × N) expands into the binary
//! parity-check matrix `H` (2M × N) by replacing the ones of each CN row with
//! the columns of that CN's component-code parity-check matrix. Column types
//! are assigned along the canonical `X Y Z X Y Z ...` prefix in increasing
//! variable index.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::Range;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::alist::token_lines;
use crate::component::{ColumnType, ComponentCode};
use crate::error::{Error, Result};
use crate::gf2::{rank, BinMatrix};

/// Protograph with circulant shifts. `None` marks an absent edge.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BaseMatrix {
    rows: usize,
    cols: usize,
    lift: usize,
    shifts: Vec<Option<usize>>,
    punctured: Vec<usize>,
}

impl BaseMatrix {
    pub fn new(
        rows: usize,
        cols: usize,
        lift: usize,
        shifts: Vec<Option<usize>>,
        punctured: Vec<usize>,
    ) -> Result<Self> {
        if rows == 0 || cols == 0 || lift == 0 {
            return Err(Error::InvalidBase(format!("dimensions {rows}x{cols} with lift {lift}")));
        }
        if shifts.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: shifts.len(),
            });
        }
        if let Some(s) = shifts.iter().flatten().find(|&&s| s >= lift) {
            return Err(Error::InvalidBase(format!("shift {s} not below lift {lift}")));
        }
        let mut punctured = punctured;
        punctured.sort_unstable();
        punctured.dedup();
        if let Some(&p) = punctured.iter().find(|&&p| p >= cols) {
            return Err(Error::InvalidBase(format!("punctured column {p} out of range")));
        }
        Ok(BaseMatrix {
            rows,
            cols,
            lift,
            shifts,
            punctured,
        })
    }

    /// Base matrix from a 0/1 edge pattern with seeded pseudo-random shifts.
    ///
    /// Shifts are drawn greedily in row-major order; each draw is retried up
    /// to `retries` times to avoid closing a length-4 cycle with the shifts
    /// already placed. If no clean choice turns up the draw with the fewest
    /// 4-cycles is kept.
    pub fn from_pattern<R: AsRef<[u8]>>(pattern: &[R], lift: usize, punctured: Vec<usize>, seed: u64) -> Result<Self> {
        let rows = pattern.len();
        let cols = pattern.first().map_or(0, |r| r.as_ref().len());
        let mut shifts = vec![None; rows * cols];
        for (r, row) in pattern.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, got: row.len() });
            }
            for (c, &e) in row.iter().enumerate() {
                if e != 0 {
                    shifts[r * cols + c] = Some(0);
                }
            }
        }
        let mut base = BaseMatrix::new(rows, cols, lift, shifts, punctured)?;
        base.reshift(seed, 64);
        Ok(base)
    }

    /// Redraws every shift, keeping the edge pattern.
    pub fn reshift(&mut self, seed: u64, retries: usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut placed = vec![None; self.shifts.len()];
        for idx in 0..self.shifts.len() {
            if self.shifts[idx].is_none() {
                continue;
            }
            let (r, c) = (idx / self.cols, idx % self.cols);
            let mut best = (usize::MAX, 0);
            for _ in 0..retries.max(1) {
                let s = rng.random_range(0..self.lift);
                let cycles = self.four_cycles_with(&placed, r, c, s);
                if cycles < best.0 {
                    best = (cycles, s);
                }
                if cycles == 0 {
                    break;
                }
            }
            placed[idx] = Some(best.1);
        }
        self.shifts = placed;
    }

    fn four_cycles_with(&self, placed: &[Option<usize>], r: usize, c: usize, s: usize) -> usize {
        let z = self.lift;
        let at = |rr: usize, cc: usize| placed[rr * self.cols + cc];
        let mut count = 0;
        for r2 in (0..self.rows).filter(|&x| x != r) {
            let Some(s_r2c) = at(r2, c) else { continue };
            for c2 in (0..self.cols).filter(|&x| x != c) {
                if let (Some(s_rc2), Some(s_r2c2)) = (at(r, c2), at(r2, c2)) {
                    if (s + s_r2c2 + 2 * z - s_rc2 - s_r2c) % z == 0 {
                        count += 1;
                    }
                }
            }
        }
        count
    }

    /// Number of length-4 cycles in the lifted graph, counted per base 2×2 minor.
    pub fn four_cycle_count(&self) -> usize {
        let mut total = 0;
        for r1 in 0..self.rows {
            for r2 in r1 + 1..self.rows {
                for c1 in 0..self.cols {
                    for c2 in c1 + 1..self.cols {
                        if let (Some(a), Some(b), Some(c), Some(d)) =
                            (self.get(r1, c1), self.get(r1, c2), self.get(r2, c2), self.get(r2, c1))
                        {
                            if (a + c + 2 * self.lift - b - d) % self.lift == 0 {
                                total += 1;
                            }
                        }
                    }
                }
            }
        }
        total
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn lift(&self) -> usize {
        self.lift
    }

    pub fn punctured(&self) -> &[usize] {
        &self.punctured
    }

    pub fn set_punctured(&mut self, cols: Vec<usize>) -> Result<()> {
        *self = BaseMatrix::new(self.rows, self.cols, self.lift, std::mem::take(&mut self.shifts), cols)?;
        Ok(())
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Option<usize> {
        self.shifts[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, shift: Option<usize>) {
        if let Some(s) = shift {
            assert!(s < self.lift, "shift {s} not below lift {}", self.lift);
        }
        self.shifts[r * self.cols + c] = shift;
    }

    pub fn has_edge(&self, r: usize, c: usize) -> bool {
        self.get(r, c).is_some()
    }

    pub fn row_degree(&self, r: usize) -> usize {
        (0..self.cols).filter(|&c| self.has_edge(r, c)).count()
    }

    pub fn col_degree(&self, c: usize) -> usize {
        (0..self.rows).filter(|&r| self.has_edge(r, c)).count()
    }

    pub fn edge_count(&self) -> usize {
        self.shifts.iter().filter(|s| s.is_some()).count()
    }

    /// 0/1 edge pattern, row-major.
    pub fn pattern(&self) -> Vec<Vec<u8>> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.has_edge(r, c) as u8).collect())
            .collect()
    }

    pub fn is_punctured(&self, c: usize) -> bool {
        self.punctured.binary_search(&c).is_ok()
    }

    /// Design rate of the CW-GLDPC code, `(cols − 2·rows) / (cols − punctured)`.
    pub fn design_rate_cw(&self) -> f64 {
        (self.cols as f64 - 2.0 * self.rows as f64) / (self.cols - self.punctured.len()) as f64
    }

    pub fn parse(src: &str) -> Result<Self> {
        let lines: Vec<_> = token_lines(src)
            .into_iter()
            .filter(|l| !l[0].text.starts_with('#'))
            .collect();
        let Some(header) = lines.first() else {
            return Err(Error::parse(1, 1, "empty base-matrix file"));
        };
        if header.len() != 3 {
            return Err(Error::parse(header[0].line, header[0].column, "header must be `rows cols lift`"));
        }
        let rows: usize = header[0].parse("row count")?;
        let cols: usize = header[1].parse("column count")?;
        let lift: usize = header[2].parse("lifting factor")?;
        if rows == 0 || cols == 0 || lift == 0 {
            return Err(Error::parse(header[0].line, header[0].column, "dimensions and lift must be positive"));
        }

        let mut shifts = Vec::with_capacity(rows * cols);
        let mut punctured = Vec::new();
        let mut saw_punctured = false;
        for line in &lines[1..] {
            if line[0].text == "punctured:" {
                if saw_punctured {
                    return Err(Error::parse(line[0].line, line[0].column, "duplicate `punctured:` line"));
                }
                saw_punctured = true;
                for t in &line[1..] {
                    let p: usize = t.parse("punctured column index")?;
                    if p >= cols {
                        return Err(Error::parse(t.line, t.column, format!("punctured column {p} out of range 0..{cols}")));
                    }
                    punctured.push(p);
                }
                continue;
            }
            if saw_punctured {
                return Err(Error::parse(line[0].line, line[0].column, "entries after the `punctured:` line"));
            }
            for t in line {
                if shifts.len() == rows * cols {
                    return Err(Error::parse(t.line, t.column, format!("more than {rows}x{cols} entries")));
                }
                let v: i64 = t.parse("shift or -1")?;
                let entry = match v {
                    -1 => None,
                    s if s >= 0 && (s as usize) < lift => Some(s as usize),
                    s => return Err(Error::parse(t.line, t.column, format!("shift {s} outside 0..{lift} (use -1 for no edge)"))),
                };
                shifts.push(entry);
            }
        }
        if shifts.len() != rows * cols {
            let line = lines.last().map_or(1, |l| l[0].line);
            return Err(Error::parse(line, 1, format!("expected {} entries, found {}", rows * cols, shifts.len())));
        }
        BaseMatrix::new(rows, cols, lift, shifts, punctured)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {}\n", self.rows, self.cols, self.lift);
        let width = self.lift.saturating_sub(1).to_string().len().max(2);
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|c| {
                    let v = self.get(r, c).map_or("-1".to_string(), |x| x.to_string());
                    format!("{v:>width$}")
                })
                .collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s.push_str("punctured:");
        for p in &self.punctured {
            write!(s, " {p}").unwrap();
        }
        s.push('\n');
        s
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let src = std::fs::read_to_string(path)?;
        BaseMatrix::parse(&src).map_err(|e| e.with_path(path))
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

/// Constraint type carried by every check node of a code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// Two-row Cordaro-Wagner dual component code.
    CwDual,
    /// Single parity check (plain LDPC).
    Spc,
}

/// Whether reported block lengths count punctured symbols.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PunctureConvention {
    /// Transmitted symbols only.
    #[default]
    Transmitted,
    /// All code symbols including punctured ones.
    Total,
}

/// An expanded code ready for decoding.
#[derive(Clone, Debug)]
pub struct LiftedCode {
    kind: CheckKind,
    gamma: BinMatrix,
    h: BinMatrix,
    checks: Vec<Vec<usize>>,
    cn_codes: Vec<ComponentCode>,
    layers: Vec<Range<usize>>,
    punctured: Vec<usize>,
    k: usize,
    base: Option<BaseMatrix>,
}

/// Random 0/1 base pattern with the given row degrees.
///
/// Columns in `dense` join every row. The remaining edges of each row go to
/// the columns with the lowest degree so far, ties broken at random, which
/// keeps column degrees within one of each other.
pub fn balanced_pattern(row_degrees: &[usize], cols: usize, dense: &[usize], seed: u64) -> Result<Vec<Vec<u8>>> {
    if let Some(&c) = dense.iter().find(|&&c| c >= cols) {
        return Err(Error::InvalidBase(format!("dense column {c} out of range")));
    }
    if let Some(&d) = row_degrees.iter().find(|&&d| d > cols || d < dense.len()) {
        return Err(Error::InvalidBase(format!("row degree {d} impossible with {cols} columns")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut col_deg = vec![0usize; cols];
    let mut pattern = Vec::with_capacity(row_degrees.len());
    for &d in row_degrees {
        let mut row = vec![0u8; cols];
        for &c in dense {
            row[c] = 1;
            col_deg[c] += 1;
        }
        let mut free: Vec<(usize, u64, usize)> = (0..cols)
            .filter(|&c| row[c] == 0)
            .map(|c| (col_deg[c], rng.random::<u64>(), c))
            .collect();
        free.sort_unstable();
        for &(_, _, c) in free.iter().take(d - dense.len()) {
            row[c] = 1;
            col_deg[c] += 1;
        }
        pattern.push(row);
    }
    Ok(pattern)
}

/// Lifts a base matrix into a CW-GLDPC code.
pub fn lift(base: &BaseMatrix) -> Result<LiftedCode> {
    lift_with(base, CheckKind::CwDual)
}

/// Lifts a base matrix into a plain single-parity-check LDPC code.
pub fn lift_spc(base: &BaseMatrix) -> Result<LiftedCode> {
    lift_with(base, CheckKind::Spc)
}

pub fn lift_with(base: &BaseMatrix, kind: CheckKind) -> Result<LiftedCode> {
    let z = base.lift;
    let (m, n) = (base.rows * z, base.cols * z);
    let mut gamma = BinMatrix::zeros(m, n);
    for r in 0..base.rows {
        for c in 0..base.cols {
            if let Some(s) = base.get(r, c) {
                for a in 0..z {
                    gamma.set(r * z + a, c * z + (a + s) % z, true);
                }
            }
        }
    }
    let punctured = base
        .punctured
        .iter()
        .flat_map(|&p| p * z..(p + 1) * z)
        .collect();
    let layers = (0..base.rows).map(|r| r * z..(r + 1) * z).collect();
    let mut code = LiftedCode::from_adjacency(gamma, kind, punctured, layers)?;
    code.base = Some(base.clone());
    Ok(code)
}

impl LiftedCode {
    /// Builds a code from its Tanner-graph adjacency `Γ` (CN rows, VN columns).
    ///
    /// `layers` partitions the CN indices for layered decoding; pass one range
    /// per CN when there is no natural grouping.
    pub fn from_adjacency(gamma: BinMatrix, kind: CheckKind, punctured: Vec<usize>, layers: Vec<Range<usize>>) -> Result<Self> {
        let (m, n) = (gamma.rows(), gamma.cols());
        let checks = gamma.row_lists();
        let min_degree = match kind {
            CheckKind::CwDual => 3,
            CheckKind::Spc => 2,
        };
        if let Some((node, vars)) = checks.iter().enumerate().find(|(_, v)| v.len() < min_degree) {
            return Err(Error::DegenerateRow { node, degree: vars.len() });
        }
        let covered: usize = layers.iter().map(|l| l.len()).sum();
        if covered != m || layers.windows(2).any(|w| w[0].end != w[1].start) || layers.first().is_some_and(|l| l.start != 0) {
            return Err(Error::InvalidBase("layers must partition the check nodes in order".into()));
        }
        let mut punctured = punctured;
        punctured.sort_unstable();
        punctured.dedup();
        if punctured.last().is_some_and(|&p| p >= n) {
            return Err(Error::InvalidBase("punctured index out of range".into()));
        }

        let (h, cn_codes) = match kind {
            CheckKind::Spc => (gamma.clone(), Vec::new()),
            CheckKind::CwDual => {
                let mut h = BinMatrix::zeros(2 * m, n);
                let mut codes = Vec::with_capacity(m);
                for (j, vars) in checks.iter().enumerate() {
                    for (pos, &v) in vars.iter().enumerate() {
                        let [top, bottom] = ColumnType::canonical(pos).column();
                        h.set(2 * j, v, top == 1);
                        h.set(2 * j + 1, v, bottom == 1);
                    }
                    codes.push(ComponentCode::canonical(vars.len())?);
                }
                (h, codes)
            }
        };
        let k = n - rank(&h);
        Ok(LiftedCode {
            kind,
            gamma,
            h,
            checks,
            cn_codes,
            layers,
            punctured,
            k,
            base: None,
        })
    }

    /// Plain LDPC code from a binary parity-check matrix, one layer per row.
    pub fn from_spc_pcm(h: BinMatrix, punctured: Vec<usize>) -> Result<Self> {
        let layers = (0..h.rows()).map(|r| r..r + 1).collect();
        LiftedCode::from_adjacency(h, CheckKind::Spc, punctured, layers)
    }

    pub fn kind(&self) -> CheckKind {
        self.kind
    }

    pub fn gamma(&self) -> &BinMatrix {
        &self.gamma
    }

    /// Binary parity-check matrix of the code.
    pub fn h(&self) -> &BinMatrix {
        &self.h
    }

    /// Variable indices of every check node, ascending.
    pub fn checks(&self) -> &[Vec<usize>] {
        &self.checks
    }

    /// Component code of every check node (empty for SPC codes).
    pub fn cn_codes(&self) -> &[ComponentCode] {
        &self.cn_codes
    }

    pub fn layers(&self) -> &[Range<usize>] {
        &self.layers
    }

    pub fn punctured(&self) -> &[usize] {
        &self.punctured
    }

    pub fn base(&self) -> Option<&BaseMatrix> {
        self.base.as_ref()
    }

    /// Total number of code symbols, punctured ones included.
    pub fn n(&self) -> usize {
        self.h.cols()
    }

    /// Number of transmitted symbols.
    pub fn n_tx(&self) -> usize {
        self.n() - self.punctured.len()
    }

    pub fn m(&self) -> usize {
        self.checks.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn length(&self, convention: PunctureConvention) -> usize {
        match convention {
            PunctureConvention::Transmitted => self.n_tx(),
            PunctureConvention::Total => self.n(),
        }
    }

    pub fn rate(&self, convention: PunctureConvention) -> f64 {
        self.k as f64 / self.length(convention) as f64
    }

    pub fn transmitted_mask(&self) -> Vec<bool> {
        let mut mask = vec![true; self.n()];
        for &p in &self.punctured {
            mask[p] = false;
        }
        mask
    }

    /// The same code with one latent variable per check node.
    ///
    /// Every CN splits into three single parity checks over its X, Y and Z
    /// edges, each also touching the CN's latent variable (column `N + j`).
    /// The latent columns are punctured. Layers follow the original ones,
    /// each CN contributing its three rows.
    pub fn latent_code(&self) -> Result<LiftedCode> {
        let pcm = expand_latent_pcm(self)?;
        let n = self.n();
        let mut punctured = self.punctured.clone();
        punctured.extend(n..n + self.m());
        let layers = self.layers.iter().map(|l| 3 * l.start..3 * l.end).collect();
        let mut code = LiftedCode::from_adjacency(pcm, CheckKind::Spc, punctured, layers)?;
        code.base = self.base.clone();
        Ok(code)
    }
}

/// Parity-check matrix of the latent-variable representation.
///
/// Shape `3M × (N + M)`: for CN `j`, rows `3j`, `3j+1`, `3j+2` are single
/// parity checks over its X, Y and Z edges plus latent column `N + j`.
pub fn expand_latent_pcm(code: &LiftedCode) -> Result<BinMatrix> {
    if code.kind != CheckKind::CwDual {
        return Err(Error::ConfigMismatch("latent expansion requires CW-dual check nodes".into()));
    }
    let (m, n) = (code.m(), code.n());
    let mut pcm = BinMatrix::zeros(3 * m, n + m);
    for (j, (vars, cc)) in code.checks.iter().zip(&code.cn_codes).enumerate() {
        for t in ColumnType::ALL {
            let row = 3 * j + t.index();
            for &pos in cc.part(t) {
                pcm.set(row, vars[pos], true);
            }
            pcm.set(row, n + j, true);
        }
    }
    Ok(pcm)
}

/// Structural summary of a code.
#[derive(Clone, Debug, Serialize)]
pub struct CodeReport {
    #[serde(rename = "N")]
    pub n: usize,
    pub n_tx: usize,
    pub k: usize,
    pub rate: f64,
    pub avg_col_weight: f64,
    pub punctured: usize,
    pub check_kind: CheckKind,
    pub weight2_cw_per_cn: Vec<usize>,
    pub cn_degree_histogram: BTreeMap<usize, usize>,
    pub vn_degree_histogram: BTreeMap<usize, usize>,
}

pub fn analyze(code: &LiftedCode) -> CodeReport {
    let mut cn_hist = BTreeMap::new();
    for vars in &code.checks {
        *cn_hist.entry(vars.len()).or_insert(0) += 1;
    }
    let mut vn_deg = vec![0usize; code.n()];
    for v in code.checks.iter().flatten() {
        vn_deg[*v] += 1;
    }
    let mut vn_hist = BTreeMap::new();
    for d in vn_deg {
        *vn_hist.entry(d).or_insert(0) += 1;
    }
    CodeReport {
        n: code.n(),
        n_tx: code.n_tx(),
        k: code.k(),
        rate: code.rate(PunctureConvention::Transmitted),
        avg_col_weight: code.h.count_ones() as f64 / code.n() as f64,
        punctured: code.punctured.len(),
        check_kind: code.kind,
        weight2_cw_per_cn: code.cn_codes.iter().map(ComponentCode::weight2_count).collect(),
        cn_degree_histogram: cn_hist,
        vn_degree_histogram: vn_hist,
    }
}
