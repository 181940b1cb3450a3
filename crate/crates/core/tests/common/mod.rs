//! Independent oracles shared by the integration and acceptance targets.
#![allow(dead_code)]

use blowup_lab::freewave::ladder::ladder_sum;
use blowup_lab::profiles::Polynomial;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Bivariate polynomial Σ c[a][b] t^a r^b with exact integer coefficients.
#[derive(Clone, Debug)]
pub struct BiPoly(pub Vec<Vec<i128>>);

fn binom(n: usize, k: usize) -> i128 {
    (0..k).fold(1i128, |acc, j| acc * (n - j) as i128 / (j + 1) as i128)
}

impl BiPoly {
    /// g(t + r) + g(t - r) expanded by the binomial theorem.
    pub fn symmetric_sum(g: &[i64]) -> Self {
        let n = g.len();
        let mut c = vec![vec![0i128; n]; n];
        for (deg, &gc) in g.iter().enumerate() {
            for b in 0..=deg {
                let sign = if b % 2 == 0 { 2 } else { 0 };
                c[deg - b][b] += gc as i128 * binom(deg, b) * sign;
            }
        }
        BiPoly(c)
    }

    /// (1/r)∂_r, exact on polynomials even in r.
    pub fn ladder_step(&self) -> Self {
        let mut c = vec![vec![0i128; self.0[0].len()]; self.0.len()];
        for (a, row) in self.0.iter().enumerate() {
            for (b, &v) in row.iter().enumerate() {
                if b >= 2 {
                    c[a][b - 2] += v * b as i128;
                } else {
                    assert!(b == 0 || v == 0, "odd power of r");
                }
            }
        }
        BiPoly(c)
    }

    pub fn d_t(&self) -> Self {
        let mut c = vec![vec![0i128; self.0[0].len()]; self.0.len()];
        for (a, row) in self.0.iter().enumerate().skip(1) {
            for (b, &v) in row.iter().enumerate() {
                c[a - 1][b] += v * a as i128;
            }
        }
        BiPoly(c)
    }

    pub fn d_r(&self) -> Self {
        let mut c = vec![vec![0i128; self.0[0].len()]; self.0.len()];
        for (a, row) in self.0.iter().enumerate() {
            for (b, &v) in row.iter().enumerate().skip(1) {
                c[a][b - 1] += v * b as i128;
            }
        }
        BiPoly(c)
    }

    /// (value, Σ |terms|) at (t, r).
    pub fn eval(&self, t: f64, r: f64) -> (f64, f64) {
        let mut v = 0.0;
        let mut m = 0.0;
        for (a, row) in self.0.iter().enumerate() {
            for (b, &c) in row.iter().enumerate() {
                let x = c as f64 * t.powi(a as i32) * r.powi(b as i32);
                v += x;
                m += x.abs();
            }
        }
        (v, m)
    }
}

/// Worst errors (values, first derivatives) of the ladder sum against the
/// symbolic oracle for `profiles` random integer polynomials, κ = 1..=5, at
/// 10 points each with r in [r_min, 2]. Errors are relative to the largest
/// Σ|terms| among the value and its two derivatives at that point.
pub fn ladder_oracle_error(profiles: usize, seed: u64, r_min: f64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = [0.0f64; 2];
    for _ in 0..profiles {
        let deg = rng.gen_range(10..=14);
        let g: Vec<i64> = (0..=deg).map(|_| rng.gen_range(-9..=9)).collect();
        let h = Polynomial::new(g.iter().map(|&c| c as f64).collect());
        let mut p = BiPoly::symmetric_sum(&g);
        for kappa in 1..=5 {
            p = p.ladder_step();
            for _ in 0..10 {
                let t = rng.gen_range(-1.5..1.5);
                let r = rng.gen_range(r_min..2.0);
                let jet = ladder_sum(&h, kappa, t, r, 1);
                let want = [p.eval(t, r), p.d_t().eval(t, r), p.d_r().eval(t, r)];
                let got = [jet.derivative(0, 0), jet.derivative(1, 0), jet.derivative(0, 1)];
                let scale = want.iter().map(|w| w.1).fold(f64::MIN_POSITIVE, f64::max);
                for (c, (g, w)) in got.iter().zip(&want).enumerate() {
                    let k = c.min(1);
                    worst[k] = worst[k].max((g - w.0).abs() / scale);
                }
            }
        }
    }
    (worst[0], worst[1])
}
