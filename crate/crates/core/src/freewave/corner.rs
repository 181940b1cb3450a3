//! Two-sided corner bounds for V near (0, 0) and the squared-radius
//! derivative bounds |F^{(j)}(y)| (1 + √y)^j ≲ 1 for F(x²) = f(x).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::field::FreeWaveField;
use crate::jet::{factorial, Jet};
use crate::profiles::{make_cutoff, SmoothFn};
use crate::Error;

#[derive(Clone, Debug, Serialize)]
pub struct CornerCertificate {
    pub c_lower: f64,
    pub c_upper: f64,
    /// Radius in (t, y) of the box {0 ≤ t ≤ ρ, 0 ≤ y ≤ ρ²} holding the sublevel set.
    pub nbhd_radius: f64,
    /// Box half-size ρ in (t, r).
    pub box_size: f64,
    /// Threshold c: |V - V(0,0)| ≤ c only inside the box (sampled).
    pub threshold: f64,
    /// Smallest |V - V(0,0)| seen outside the box.
    pub outside_min: f64,
    pub samples: usize,
    pub pass: bool,
}

const BOX_CANDIDATES: [f64; 5] = [0.25, 0.125, 0.0625, 0.03125, 0.015625];

fn ratios(field: &FreeWaveField, rho: f64, n: usize, v0: [f64; 2]) -> Result<(f64, f64), Error> {
    let pts: Vec<(f64, f64)> = (0..=n)
        .flat_map(|i| (0..=n).map(move |j| (i, j)))
        .filter(|&(i, j)| i + j > 0)
        .map(|(i, j)| {
            // quadratic spacing resolves the scale of v₂ near the origin
            let t = rho * (i as f64 / n as f64).powi(2);
            let r = rho * (j as f64 / n as f64).powi(2);
            (t, r)
        })
        .collect();
    let q: Vec<(f64, f64)> = pts
        .par_iter()
        .map(|&(t, r)| -> Result<(f64, f64), Error> {
            let v = field.value(t, r)?;
            let y = r * r;
            let q1 = (v0[0] - v[0]) / (t + y);
            let q2 = (v0[1] - v[1]) / (t * t + y);
            Ok((q1.min(q2), q1.max(q2)))
        })
        .collect::<Result<_, _>>()?;
    Ok(q.iter().fold((f64::INFINITY, 0.0f64), |a, b| (a.0.min(b.0), a.1.max(b.1))))
}

/// Item (v) on t ≥ 0. The box is the largest candidate on which both ratio
/// families are positive; the threshold is half the smaller of c_lower and
/// the closest outside approach.
pub fn corner_certificate(field: &FreeWaveField, grid: usize, outside: usize, seed: u64) -> Result<CornerCertificate, Error> {
    let v0 = field.value(0.0, 0.0)?;
    let mut chosen = None;
    for &rho in &BOX_CANDIDATES {
        let (lo, hi) = ratios(field, rho, grid, v0)?;
        if lo > 0.0 && hi.is_finite() {
            chosen = Some((rho, lo, hi));
            break;
        }
    }
    let Some((rho, c_lower, c_upper)) = chosen else {
        return Ok(CornerCertificate {
            c_lower: f64::NAN,
            c_upper: f64::NAN,
            nbhd_radius: 0.0,
            box_size: 0.0,
            threshold: 0.0,
            outside_min: 0.0,
            samples: (grid + 1) * (grid + 1) - 1,
            pass: false,
        });
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<(f64, f64)> = (0..outside)
        .filter_map(|i| {
            let (t, r) = match i % 3 {
                0 => (rng.gen_range(0.0..4.0 * rho), rng.gen_range(0.0..4.0 * rho)),
                1 => (rng.gen_range(0.0..1.5), rng.gen_range(0.0..1.5)),
                _ => {
                    let t = rng.gen_range(0.0..50.0);
                    (t, (t + rng.gen_range(-2.1..2.1f64)).abs())
                }
            };
            (t > rho || r > rho).then_some((t, r))
        })
        .collect();
    let gaps: Vec<f64> = pts
        .par_iter()
        .map(|&(t, r)| field.value(t, r).map(|v| (v[0] - v0[0]).hypot(v[1] - v0[1])))
        .collect::<Result<_, _>>()?;
    let outside_min = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    let threshold = 0.5 * c_lower.min(outside_min);
    Ok(CornerCertificate {
        c_lower,
        c_upper,
        nbhd_radius: rho.hypot(rho * rho),
        box_size: rho,
        threshold,
        outside_min,
        samples: (grid + 1) * (grid + 1) - 1 + pts.len(),
        pass: c_lower > 0.0 && c_lower <= c_upper && threshold > 0.0,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RadBound {
    pub name: String,
    /// K_j = sup_y (1+√y)^j |F^{(j)}(y)| / max_{i≤2j} sup |f^{(i)}|, j = 1..=4.
    pub constants: Vec<f64>,
    /// Same constants on a grid twice as fine.
    pub refined: Vec<f64>,
    pub stable: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RadReport {
    pub functions: Vec<RadBound>,
    pub pass: bool,
}

const RAD_ORDER: usize = 4;

/// y-derivatives of F(y) = f(√y) from x-jets of an even f.
fn squared_derivatives(f: &dyn Fn(f64, usize) -> Jet, y: f64) -> Vec<f64> {
    let x = y.sqrt();
    if x >= 0.5 {
        let s = Jet::variable(y, RAD_ORDER).powf(0.5);
        return s.compose(&f(x, RAD_ORDER)).derivatives();
    }
    // F(y) = Σ f^{(2n)}(0)/(2n)! y^n
    let n_max = 20;
    let a = f(0.0, 2 * n_max);
    (0..=RAD_ORDER)
        .map(|j| {
            (j..=n_max)
                .map(|n| a.taylor()[2 * n] * factorial(n) / factorial(n - j) * y.powi((n - j) as i32))
                .sum()
        })
        .collect()
}

fn rad_constants(
    f: &(dyn Fn(f64, usize) -> Jet + Sync),
    fy: &(dyn Fn(f64) -> Vec<f64> + Sync),
    range: (f64, f64),
    n: usize,
) -> Vec<f64> {
    let xs: Vec<f64> = (0..=n).map(|i| range.0 + (range.1 - range.0) * i as f64 / n as f64).collect();
    let sups = xs
        .par_iter()
        .map(|&x| f(x, 2 * RAD_ORDER).derivatives().iter().map(|d| d.abs()).collect::<Vec<_>>())
        .reduce(|| vec![0.0; 2 * RAD_ORDER + 1], |a, b| a.iter().zip(&b).map(|(p, q)| p.max(*q)).collect());
    let lhs = xs
        .par_iter()
        .map(|&x| {
            let d = fy(x * x);
            (0..=RAD_ORDER).map(|j| (1.0 + x).powi(j as i32) * d[j].abs()).collect::<Vec<_>>()
        })
        .reduce(|| vec![0.0; RAD_ORDER + 1], |a, b| a.iter().zip(&b).map(|(p, q)| p.max(*q)).collect());
    (1..=RAD_ORDER)
        .map(|j| lhs[j] / sups[..=2 * j].iter().copied().fold(0.0, f64::max))
        .collect()
}

fn bound(name: &str, f: &(dyn Fn(f64, usize) -> Jet + Sync), fy: &(dyn Fn(f64) -> Vec<f64> + Sync), range: (f64, f64)) -> RadBound {
    let constants = rad_constants(f, fy, range, 400);
    let refined = rad_constants(f, fy, range, 800);
    let stable = constants
        .iter()
        .zip(&refined)
        .all(|(a, b)| a.is_finite() && b.is_finite() && *b <= 1.1 * a + 1e-300);
    RadBound { name: name.into(), constants, refined, stable }
}

/// Lemma rad on three polynomial-times-cutoff test functions and on radial
/// slices of both components of V.
pub fn rad_bounds(field: &FreeWaveField) -> Result<RadReport, Error> {
    let cutoff = make_cutoff();
    let polys: [(&str, Vec<f64>); 3] = [
        ("cutoff", vec![1.0]),
        ("(1+x^2)cutoff", vec![1.0, 0.0, 1.0]),
        ("(x^4-3x^2+2)cutoff", vec![2.0, 0.0, -3.0, 0.0, 1.0]),
    ];
    let mut functions = Vec::new();
    for (name, p) in &polys {
        let f = |x: f64, order: usize| {
            let v = Jet::variable(x, order);
            let mut acc = Jet::constant(x, 0.0, order);
            for c in p.iter().rev() {
                acc = &(&acc * &v) + *c;
            }
            &acc * &cutoff.jet(x, order)
        };
        let fy = |y: f64| squared_derivatives(&f, y);
        functions.push(bound(name, &f, &fy, (0.0, 2.5)));
    }
    // V₂(1, ·) vanishes off |r - 1| ≤ ε
    let e = field.epsilon;
    for (name, t0, comp, range) in
        [("V1(3, .)", 3.0, 0usize, (0.0, 3.0 + field.support_bound())), ("V2(1, .)", 1.0, 1, (1.0 - e, 1.0 + e))]
    {
        let w = if comp == 0 { &field.v1 } else { &field.v2 };
        let f = |x: f64, order: usize| {
            let j = w.ladder_apply(t0, x, 0, order).expect("order within ladder range");
            Jet::from_derivatives(x, &(0..=order).map(|b| j.derivative(0, b)).collect::<Vec<_>>())
        };
        let fy = |y: f64| {
            let j = w.ty_jet(t0, y, RAD_ORDER).expect("order within ladder range");
            (0..=RAD_ORDER).map(|m| j.derivative(0, m)).collect::<Vec<_>>()
        };
        functions.push(bound(name, &f, &fy, range));
    }
    let pass = functions.iter().all(|f| f.stable);
    Ok(RadReport { functions, pass })
}
