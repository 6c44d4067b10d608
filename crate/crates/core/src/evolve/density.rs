//! Probability mass functions of quantized LLRs.

use std::cell::RefCell;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

/// Uniform LLR grid `j·δ` for `j ∈ [−K, K]`. The two end bins are saturation
/// bins holding all mass at `|L| ≥ K·δ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    delta: f64,
    k: usize,
}

impl Grid {
    /// Grid with step `delta` reaching `±l_max` (rounded to whole steps).
    pub fn new(delta: f64, l_max: f64) -> Self {
        assert!(delta > 0.0 && l_max >= delta, "grid needs 0 < delta <= l_max");
        Grid {
            delta,
            k: (l_max / delta).round() as usize,
        }
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Largest level index `K`.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l_max(&self) -> f64 {
        self.k as f64 * self.delta
    }

    pub fn bins(&self) -> usize {
        2 * self.k + 1
    }

    /// LLR value of bin `i` (bin `K` is zero).
    pub fn value(&self, i: usize) -> f64 {
        self.level(i) as f64 * self.delta
    }

    pub fn level(&self, i: usize) -> i64 {
        i as i64 - self.k as i64
    }

    /// Bin of `level`, saturating at the ends.
    pub fn bin_of_level(&self, level: i64) -> usize {
        (level.clamp(-(self.k as i64), self.k as i64) + self.k as i64) as usize
    }

    /// Nearest bin to `x`, ties away from zero, saturating at the ends.
    pub fn bin_of(&self, x: f64) -> usize {
        let q = (x / self.delta).round();
        let k = self.k as f64;
        (q.clamp(-k, k) + k) as usize
    }
}

impl Default for Grid {
    fn default() -> Self {
        Grid::new(0.05, 30.0)
    }
}

/// Below this, FFT round-off is indistinguishable from signal.
const FFT_FLOOR: f64 = 1e-15;

#[derive(Clone, Debug, PartialEq)]
pub struct Density {
    grid: Grid,
    mass: Vec<f64>,
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

impl Density {
    /// Normalizes `mass` onto `grid`.
    ///
    /// # Panics
    /// If the length does not match the grid or the mass is not positive.
    pub fn from_mass(grid: Grid, mass: Vec<f64>) -> Self {
        assert_eq!(mass.len(), grid.bins());
        let mut d = Density { grid, mass };
        d.normalize();
        d
    }

    pub fn point(grid: Grid, x: f64) -> Self {
        let mut mass = vec![0.0; grid.bins()];
        mass[grid.bin_of(x)] = 1.0;
        Density { grid, mass }
    }

    pub fn zero(grid: Grid) -> Self {
        Density::point(grid, 0.0)
    }

    /// `N(mean, var)` integrated over each bin; the end bins take the tails.
    pub fn gaussian(grid: Grid, mean: f64, var: f64) -> Self {
        let sd = var.sqrt();
        // P(X > x)
        let tail = |x: f64| 0.5 * libm::erfc((x - mean) / (sd * std::f64::consts::SQRT_2));
        let d = grid.delta;
        let mass = (0..grid.bins())
            .map(|i| {
                let v = grid.value(i);
                let upper = if i + 1 == grid.bins() { 0.0 } else { tail(v + d / 2.0) };
                let lower = if i == 0 { 1.0 } else { tail(v - d / 2.0) };
                (lower - upper).max(0.0)
            })
            .collect();
        Density::from_mass(grid, mass)
    }

    /// Histogram of `samples`, each rounded to its nearest bin.
    pub fn from_samples(grid: Grid, samples: impl IntoIterator<Item = f64>) -> Self {
        let mut mass = vec![0.0; grid.bins()];
        for x in samples {
            mass[grid.bin_of(x)] += 1.0;
        }
        Density::from_mass(grid, mass)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }

    pub fn p_negative(&self) -> f64 {
        self.mass[..self.grid.k].iter().sum()
    }

    pub fn p_zero(&self) -> f64 {
        self.mass[self.grid.k]
    }

    /// `P(L < 0) + P(L = 0)/2`.
    pub fn error_prob(&self) -> f64 {
        self.p_negative() + 0.5 * self.p_zero()
    }

    pub fn mean(&self) -> f64 {
        self.mass.iter().enumerate().map(|(i, m)| m * self.grid.value(i)).sum()
    }

    fn normalize(&mut self) {
        for m in &mut self.mass {
            if *m < 0.0 {
                *m = 0.0;
            }
        }
        let t = self.total();
        assert!(t > 0.0, "density has no mass");
        for m in &mut self.mass {
            *m /= t;
        }
    }

    /// Density of the sum of independent draws, saturated at the grid ends.
    pub fn convolve(&self, other: &Density) -> Density {
        assert_eq!(self.grid, other.grid);
        let b = self.grid.bins();
        let len = 2 * b - 1;
        let size = len.next_power_of_two();
        // both real inputs ride in one complex transform: z = a + i·b
        let mut z: Vec<Complex<f64>> = (0..size)
            .map(|i| Complex::new(self.mass.get(i).copied().unwrap_or(0.0), other.mass.get(i).copied().unwrap_or(0.0)))
            .collect();
        let (fwd, inv) = PLANNER.with(|p| {
            let mut p = p.borrow_mut();
            (p.plan_fft_forward(size), p.plan_fft_inverse(size))
        });
        fwd.process(&mut z);
        // A·B = (Z[k]² − conj(Z[−k])²) / 4i
        let prod: Vec<Complex<f64>> = (0..size)
            .map(|k| {
                let zk = z[k];
                let zm = z[(size - k) % size].conj();
                (zk * zk - zm * zm) * Complex::new(0.0, -0.25)
            })
            .collect();
        let mut out = prod;
        inv.process(&mut out);
        let scale = 1.0 / size as f64;
        let mut mass = vec![0.0; b];
        let k = self.grid.k as i64;
        for (i, c) in out.iter().take(len).enumerate() {
            let v = c.re * scale;
            if v > FFT_FLOOR {
                // index i of the linear convolution is level i − 2K
                mass[self.grid.bin_of_level(i as i64 - 2 * k)] += v;
            }
        }
        Density::from_mass(self.grid, mass)
    }

    /// Same as [`Density::convolve`], by direct summation.
    pub fn convolve_direct(&self, other: &Density) -> Density {
        assert_eq!(self.grid, other.grid);
        let mut mass = vec![0.0; self.grid.bins()];
        for (i, &a) in self.mass.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in other.mass.iter().enumerate() {
                let level = self.grid.level(i) + self.grid.level(j);
                mass[self.grid.bin_of_level(level)] += a * b;
            }
        }
        Density::from_mass(self.grid, mass)
    }

    /// Density of `sgn(a)·sgn(b)·min(|a|, |b|)` for independent `a`, `b`.
    ///
    /// Uses tail masses: `P(out ≥ m) = A⁺B⁺ + A⁻B⁻` and
    /// `P(out ≤ −m) = A⁺B⁻ + A⁻B⁺` where `A⁺ = P(a ≥ m)`, `A⁻ = P(a ≤ −m)`.
    pub fn min_sum(&self, other: &Density) -> Density {
        assert_eq!(self.grid, other.grid);
        let k = self.grid.k;
        let tails = |d: &Density| {
            // pos[m] = P(L ≥ m·δ), neg[m] = P(L ≤ −m·δ) for m in 1..=K
            let mut pos = vec![0.0; k + 2];
            let mut neg = vec![0.0; k + 2];
            for m in (1..=k).rev() {
                pos[m] = pos[m + 1] + d.mass[k + m];
                neg[m] = neg[m + 1] + d.mass[k - m];
            }
            (pos, neg)
        };
        let (ap, an) = tails(self);
        let (bp, bn) = tails(other);
        let ge = |m: usize| ap[m] * bp[m] + an[m] * bn[m];
        let le = |m: usize| ap[m] * bn[m] + an[m] * bp[m];
        let mut mass = vec![0.0; self.grid.bins()];
        for m in 1..=k {
            mass[k + m] = (ge(m) - ge(m + 1)).max(0.0);
            mass[k - m] = (le(m) - le(m + 1)).max(0.0);
        }
        mass[k] = (1.0 - ge(1) - le(1)).max(0.0);
        Density::from_mass(self.grid, mass)
    }

    /// Same as [`Density::min_sum`], by a double loop over bin pairs.
    pub fn min_sum_direct(&self, other: &Density) -> Density {
        assert_eq!(self.grid, other.grid);
        let mut mass = vec![0.0; self.grid.bins()];
        for (i, &a) in self.mass.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let la = self.grid.level(i);
            for (j, &b) in other.mass.iter().enumerate() {
                let lb = self.grid.level(j);
                let mag = la.abs().min(lb.abs());
                let negative = (la < 0) != (lb < 0);
                mass[self.grid.bin_of_level(if negative { -mag } else { mag })] += a * b;
            }
        }
        Density::from_mass(self.grid, mass)
    }

    /// Density of `α·L`, each level rounded to the nearest level (ties away from zero).
    pub fn scale(&self, alpha: f64) -> Density {
        if alpha == 1.0 {
            return self.clone();
        }
        let mut mass = vec![0.0; self.grid.bins()];
        for (i, &m) in self.mass.iter().enumerate() {
            let target = (alpha * self.grid.level(i) as f64).round() as i64;
            mass[self.grid.bin_of_level(target)] += m;
        }
        Density::from_mass(self.grid, mass)
    }

    /// Total-variation distance `½·Σ|p − q|`.
    pub fn tv_distance(&self, other: &Density) -> f64 {
        0.5 * self.mass.iter().zip(&other.mass).map(|(a, b)| (a - b).abs()).sum::<f64>()
    }

    /// Earth mover's distance in LLR units.
    pub fn w1_distance(&self, other: &Density) -> f64 {
        let mut diff = 0.0;
        let mut acc = 0.0;
        for (a, b) in self.mass.iter().zip(&other.mass) {
            diff += a - b;
            acc += diff.abs();
        }
        acc * self.grid.delta
    }

    /// Mirror image `L → −L`.
    pub fn flipped(&self) -> Density {
        let mut mass = self.mass.clone();
        mass.reverse();
        Density { grid: self.grid, mass }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn small() -> Grid {
        Grid::new(0.5, 10.0)
    }

    fn random_density(grid: Grid, weights: &[f64]) -> Density {
        let mut mass = vec![0.0; grid.bins()];
        for (i, w) in weights.iter().enumerate() {
            mass[(i * 7) % grid.bins()] += w;
        }
        Density::from_mass(grid, mass)
    }

    #[test]
    fn grid_rounding() {
        let g = Grid::default();
        assert_eq!(g.bins(), 1201);
        assert_eq!(g.bin_of(0.0), 600);
        assert_eq!(g.bin_of(0.025), 601);
        assert_eq!(g.bin_of(-0.025), 599);
        assert_eq!(g.bin_of(1e9), 1200);
        assert_eq!(g.bin_of(-1e9), 0);
        assert!((g.value(620) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn point_masses_add() {
        let g = small();
        let c = Density::point(g, 1.5).convolve(&Density::point(g, 2.0));
        assert!((c.mass()[g.bin_of(3.5)] - 1.0).abs() < 1e-12);
        let sat = Density::point(g, 8.0).convolve(&Density::point(g, 7.0));
        assert!((sat.mass()[g.bins() - 1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn min_sum_point_masses() {
        let g = small();
        let d = Density::point(g, -3.0).min_sum(&Density::point(g, 2.0));
        assert_eq!(d, Density::point(g, -2.0));
        let d = Density::point(g, 0.0).min_sum(&Density::point(g, -5.0));
        assert_eq!(d, Density::zero(g));
    }

    #[test]
    fn scale_rounds_half_away() {
        let g = Grid::new(1.0, 10.0);
        assert_eq!(Density::point(g, 2.0).scale(0.75), Density::point(g, 2.0));
        assert_eq!(Density::point(g, -2.0).scale(0.75), Density::point(g, -2.0));
        assert_eq!(Density::point(g, 4.0).scale(0.75), Density::point(g, 3.0));
        assert_eq!(Density::point(g, 10.0).scale(0.75), Density::point(g, 8.0));
    }

    #[test]
    fn gaussian_moments() {
        let g = Grid::new(0.01, 30.0);
        let d = Density::gaussian(g, 2.0, 4.0);
        assert!((d.total() - 1.0).abs() < 1e-12);
        assert!((d.mean() - 2.0).abs() < 1e-3);
        let p = 0.5 * libm::erfc(2.0 / (2.0 * std::f64::consts::SQRT_2));
        assert!((d.error_prob() - p).abs() < 1e-3);
    }

    #[test]
    fn w1_of_shift() {
        let g = small();
        let a = Density::point(g, 1.0);
        let b = Density::point(g, 2.5);
        assert!((a.w1_distance(&b) - 1.5).abs() < 1e-12);
        assert!((a.tv_distance(&b) - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn fft_matches_direct(w1 in prop::collection::vec(0.0f64..1.0, 1..40), w2 in prop::collection::vec(0.0f64..1.0, 1..40)) {
            prop_assume!(w1.iter().sum::<f64>() > 0.01 && w2.iter().sum::<f64>() > 0.01);
            let g = small();
            let (a, b) = (random_density(g, &w1), random_density(g, &w2));
            let (f, d) = (a.convolve(&b), a.convolve_direct(&b));
            for (x, y) in f.mass().iter().zip(d.mass()) {
                prop_assert!((x - y).abs() < 1e-12);
            }
            prop_assert!((f.total() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn tail_min_sum_matches_direct(w1 in prop::collection::vec(0.0f64..1.0, 1..40), w2 in prop::collection::vec(0.0f64..1.0, 1..40)) {
            prop_assume!(w1.iter().sum::<f64>() > 0.01 && w2.iter().sum::<f64>() > 0.01);
            let g = small();
            let (a, b) = (random_density(g, &w1), random_density(g, &w2));
            let (f, d) = (a.min_sum(&b), a.min_sum_direct(&b));
            for (x, y) in f.mass().iter().zip(d.mass()) {
                prop_assert!((x - y).abs() < 1e-12);
            }
            prop_assert!((f.total() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn min_sum_keeps_symmetry(w in prop::collection::vec(0.0f64..1.0, 1..21)) {
            prop_assume!(w.iter().sum::<f64>() > 0.01);
            let g = small();
            let half = random_density(g, &w);
            // mixture of a density and its mirror is symmetric
            let sym = Density::from_mass(g, half.mass().iter().zip(half.flipped().mass()).map(|(a, b)| a + b).collect());
            let out = sym.min_sum(&sym);
            for (x, y) in out.mass().iter().zip(out.flipped().mass()) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }

        #[test]
        fn scale_preserves_mass(w in prop::collection::vec(0.0f64..1.0, 1..40), alpha in 0.1f64..1.0) {
            prop_assume!(w.iter().sum::<f64>() > 0.01);
            let d = random_density(small(), &w).scale(alpha);
            prop_assert!((d.total() - 1.0).abs() < 1e-12);
        }
    }
}
