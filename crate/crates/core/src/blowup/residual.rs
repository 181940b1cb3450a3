//! PDE residual on the patches and the blowup amplitude at the origin.
//!
//! On R_i every lower scale is an exact free wave, so □U = □(η·scale-i term).
//! That term carries the N_{i-1}^{-15/4} amplitude under an O(N_{i-1}^{3/2})
//! sum, so the check differences it alone: □̃(ηW) = η□̃W + [□̃, η]W with
//! □̃ = -∂_aa + 4ρ̂²∂_bb + 2dΛ⁻¹∂_b. Both pieces are compared after one
//! Richardson step: □̃W against 0 (relative to its parts) and Λδ[□̃, η]W
//! against δΦ from eval_f.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::certify::strip_anchors;
use super::config::BlowupConfig;
use super::patch::{PatchMaps, PatchPoint};
use super::physical::{eval_physical, Pruned};
use super::scaled::ScaledReal;
use crate::jet2::Jet2;
use crate::Error;

pub const RESIDUAL_TOL: f64 = 1e-5;
pub const CONSISTENCY_TOL: f64 = 1e-9;

/// -∂_tt + 4y∂_yy + 2d∂_y of a (t, y)-jet at its center.
pub fn ty_dalembertian(j: &Jet2, y: f64, d: usize) -> f64 {
    -j.derivative(2, 0) + 4.0 * y * j.derivative(0, 2) + 2.0 * d as f64 * j.derivative(0, 1)
}

#[derive(Clone, Debug, Serialize)]
pub struct PatchResidual {
    pub i: usize,
    pub samples: usize,
    /// max |Λδ[□̃,η]W - δΦ| / sup|δΦ| after Richardson.
    pub commutator_error: f64,
    /// max |□̃W| / (|∂_aaW| + |4ρ̂²∂_bbW| + |2dΛ⁻¹∂_bW|) after Richardson.
    pub free_wave_error: f64,
    /// sup |δΦ| over the samples: the residual magnitude, i-independent.
    pub magnitude: f64,
    /// max relative gap between the patch evaluation and the direct sum.
    pub consistency: f64,
    pub pass: bool,
}

fn second_difference(f: &dyn Fn(f64) -> f64, h: f64) -> f64 {
    (-f(2.0 * h) + 16.0 * f(h) - 30.0 * f(0.0) + 16.0 * f(-h) - f(-2.0 * h)) / (12.0 * h * h)
}

fn first_difference(f: &dyn Fn(f64) -> f64, h: f64) -> f64 {
    (-f(2.0 * h) + 8.0 * f(h) - 8.0 * f(-h) + f(-2.0 * h)) / (12.0 * h)
}

/// One Richardson step on a fourth-order stencil.
fn richardson(f: &dyn Fn(f64) -> f64, h: f64) -> f64 {
    (16.0 * f(h / 2.0) - f(h)) / 15.0
}

/// σ-ranges and a-steps per component: v₁ on its profile support, v₂ on
/// the ε-band where it lives.
fn component_window(pm: &PatchMaps, c: usize) -> ((f64, f64), f64) {
    let e = pm.epsilon();
    if c == 0 { ((-1.9, 0.8), 1e-3) } else { ((-0.5 * e, 0.5 * e), 2.5e-4 * e) }
}

pub fn patch_residual(cfg: &BlowupConfig, i: usize, samples: usize, seed: u64) -> Result<PatchResidual, Error> {
    let pm = PatchMaps::new(cfg, i)?;
    let anchors = strip_anchors(&pm, 64);
    let d = cfg.d as f64;
    let li = pm.lambda_inv;
    let mut comm = [0.0f64; 2];
    let mut free: f64 = 0.0;
    let mut mag = [0.0f64; 2];
    for c in 0..2 {
        let ((lo, hi), h) = component_window(&pm, c);
        let mut rng = ChaCha8Rng::seed_from_u64(seed + c as u64);
        let pts: Vec<PatchPoint> = (0..samples)
            .map(|_| {
                // interior of the cutoff ramp
                let an = anchors[rng.gen_range(1..anchors.len() - 1)];
                PatchPoint { anchor: an, a: rng.gen_range(lo..hi), b: 0.0 }
            })
            .collect();
        let rows: Vec<(f64, f64, f64)> = pts
            .par_iter()
            .map(|p| -> Result<(f64, f64, f64), Error> {
                let w = |da: f64, db: f64| pm.strip_wave(&p.offset(da, db), 0).map(|j| j[c].value()).unwrap_or(0.0);
                // Λδ[□̃, η]W = -δ ∂_aa(Λ(η - η₀)W), η differences from the Taylor jet
                let inc = |da: f64| pm.eval_increment(p, da) * w(da, 0.0);
                let lhs = -richardson(&|hh| second_difference(&inc, hh), h) * pm.delta;
                let want = pm.eval_f(p, 0)?.phi[c].value() * pm.delta;
                // b moves σ by -b/(2ρ); an incommensurate b-step keeps the
                // a- and b-stencils from sampling the same σ values
                let hb = 2.0 * p.anchor.rho2.sqrt() * h * std::f64::consts::FRAC_1_SQRT_2;
                let waa = richardson(&|hh| second_difference(&|x| w(x, 0.0), hh), h);
                let wbb = richardson(&|hh| second_difference(&|x| w(0.0, x), hh), hb);
                let wb = richardson(&|hh| first_difference(&|x| w(0.0, x), hh), hb);
                let rho_hat2 = p.anchor.rho2 + p.b * li;
                let parts = [-waa, 4.0 * rho_hat2 * wbb, 2.0 * d * li * wb];
                let scale: f64 = parts.iter().map(|x| x.abs()).sum();
                let fw = if scale > 0.0 { parts.iter().sum::<f64>().abs() / scale } else { 0.0 };
                Ok(((lhs - want).abs(), fw, want.abs()))
            })
            .collect::<Result<_, _>>()?;
        mag[c] = rows.iter().map(|r| r.2).fold(0.0, f64::max);
        comm[c] = rows.iter().map(|r| r.0).fold(0.0, f64::max) / mag[c].max(f64::MIN_POSITIVE);
        free = free.max(rows.iter().map(|r| r.1).fold(0.0, f64::max));
    }
    let commutator_error = comm[0].max(comm[1]);
    let consistency = consistency(cfg, &pm, 16)?;
    Ok(PatchResidual {
        i,
        samples: 2 * samples,
        commutator_error,
        free_wave_error: free,
        magnitude: mag[0].max(mag[1]),
        consistency,
        pass: commutator_error <= RESIDUAL_TOL && free <= RESIDUAL_TOL && consistency <= CONSISTENCY_TOL,
    })
}

/// Patch evaluation against the direct physical sum at anchors of R_i.
fn consistency(cfg: &BlowupConfig, pm: &PatchMaps, n: usize) -> Result<f64, Error> {
    let prev = cfg.n(pm.i - 1);
    let mut worst: f64 = 0.0;
    let mut anchors = pm.rect.grid(n / 4);
    anchors.extend(strip_anchors(pm, n));
    for an in anchors {
        let u = pm.eval_u(&PatchPoint { anchor: an, a: 0.0, b: 0.0 }, 0)?.value();
        let t = ScaledReal::from_f64(an.tau, cfg.n0).div(&prev);
        let y = ScaledReal::from_f64(an.rho2, cfg.n0).div(&prev.mul(&prev));
        let v = eval_physical(cfg, &t, &y)?.value;
        // relative to |U|: a component deep in its e^{-1/x} tail has no
        // meaningful relative error of its own
        let size = u[0].abs().add(&u[1].abs());
        let gap = u[0].sub(&v[0]).abs().add(&u[1].sub(&v[1]).abs());
        worst = worst.max(gap.div(&size).to_f64());
    }
    Ok(worst)
}

#[derive(Clone, Debug, Serialize)]
pub struct AmplitudeRow {
    pub j: usize,
    pub u: [ScaledReal; 2],
    /// |U(δ/N_j, 0)| / N_j^{3/2}.
    pub ratio: f64,
    pub dominant_scale: usize,
    /// (s, log10 |term|) for the unpruned terms.
    pub terms: Vec<(usize, f64)>,
    pub huygens_pruned: Vec<usize>,
    pub cutoff_pruned: Vec<usize>,
    pub log10_u: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AmplitudeReport {
    pub v00: f64,
    pub rows: Vec<AmplitudeRow>,
    /// log10|U| strictly increasing in j.
    pub growing: bool,
    pub pass: bool,
}

fn norm(v: &[ScaledReal; 2]) -> ScaledReal {
    // |v| = max-component · hypot of the ratios, all in scaled form
    let big = if v[0].cmp_abs(&v[1]).is_ge() { v[0] } else { v[1] };
    if big.is_zero() {
        return big;
    }
    let a = v[0].div(&big).to_f64();
    let b = v[1].div(&big).to_f64();
    big.abs().scale(a.hypot(b))
}

pub fn amplitude(cfg: &BlowupConfig, j_max: usize) -> Result<AmplitudeReport, Error> {
    let v0 = cfg.field.value(0.0, 0.0)?;
    let v00 = v0[0].hypot(v0[1]);
    let mut rows = Vec::new();
    for j in 1..=j_max {
        let nj = cfg.n(j);
        let t = ScaledReal::from_f64(cfg.delta, cfg.n0).div(&nj);
        let pv = eval_physical(cfg, &t, &ScaledReal::zero(cfg.n0))?;
        let mag = norm(&pv.value);
        let ratio = mag.div(&ScaledReal::power(cfg.n0, cfg.q_of(j) * num_rational::Rational64::new(3, 2))).to_f64();
        let live: Vec<(usize, ScaledReal)> =
            pv.terms.iter().filter(|s| s.pruned.is_none()).map(|s| (s.s, norm(&s.value))).collect();
        let dominant_scale = live.iter().max_by(|a, b| a.1.cmp_abs(&b.1)).map(|x| x.0).unwrap_or(0);
        let pruned = |kind: Pruned| pv.terms.iter().filter(|s| s.pruned == Some(kind)).map(|s| s.s).collect::<Vec<_>>();
        rows.push(AmplitudeRow {
            j,
            u: pv.value,
            ratio,
            dominant_scale,
            terms: live.iter().map(|(s, v)| (*s, v.log10_abs())).collect(),
            huygens_pruned: pruned(Pruned::Huygens),
            cutoff_pruned: pruned(Pruned::Cutoff),
            log10_u: mag.log10_abs(),
            pass: ratio >= 0.5 * v00 && ratio <= 2.0 * v00 && dominant_scale == j,
        });
    }
    let growing = rows.windows(2).all(|w| w[1].log10_u > w[0].log10_u);
    let pass = growing && rows.iter().all(|r| r.pass);
    Ok(AmplitudeReport { v00, rows, growing, pass })
}

#[derive(Clone, Debug, Serialize)]
pub struct SupportReport {
    pub samples: usize,
    pub nonzero: usize,
    pub pass: bool,
}

/// U vanishes past every cutoff and off every Huygens cone: random physical
/// points with t > 2δ/N₀, or with r beyond t + 2.1/N₁ and N₁(t + r) past
/// the profile support.
pub fn support_check(cfg: &BlowupConfig, samples: usize, seed: u64) -> Result<SupportReport, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n0 = cfg.n0;
    let bound = cfg.field.support_bound();
    let n1 = cfg.n(1);
    let mut nonzero = 0;
    for k in 0..samples {
        let (t, y) = if k % 2 == 0 {
            let t = ScaledReal::from_f64(cfg.delta * rng.gen_range(2.001..1e3), n0).div(&cfg.n(0));
            let r = ScaledReal::from_f64(rng.gen_range(0.0..1.0), n0);
            (t, r.mul(&r))
        } else {
            // t inside some R_i, r off all cones
            let i = rng.gen_range(1..=cfg.i_max);
            let t = ScaledReal::from_f64(cfg.delta * rng.gen_range(0.05..2.0), n0).div(&cfg.n(i - 1));
            let gap = ScaledReal::from_f64(rng.gen_range(bound + 0.1..100.0), n0).div(&n1);
            let r = t.add(&gap);
            (t, r.mul(&r))
        };
        if !eval_physical(cfg, &t, &y)?.is_zero() {
            nonzero += 1;
        }
    }
    Ok(SupportReport { samples, nonzero, pass: nonzero == 0 })
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidualAmplitudeReport {
    pub patches: Vec<PatchResidual>,
    /// max/min of the residual magnitudes across i.
    pub magnitude_band: f64,
    pub amplitude: AmplitudeReport,
    pub support: SupportReport,
    pub pass: bool,
}

pub fn residual_and_amplitude(cfg: &BlowupConfig, j_max: usize, samples: usize) -> Result<ResidualAmplitudeReport, Error> {
    let patches: Vec<PatchResidual> =
        (2..=cfg.i_max).map(|i| patch_residual(cfg, i, samples, 11)).collect::<Result<_, _>>()?;
    let mags: Vec<f64> = patches.iter().map(|p| p.magnitude).collect();
    let magnitude_band = mags.iter().copied().fold(0.0, f64::max) / mags.iter().copied().fold(f64::INFINITY, f64::min);
    let amplitude = amplitude(cfg, j_max)?;
    let support = support_check(cfg, 500, 5)?;
    let pass = patches.iter().all(|p| p.pass) && magnitude_band <= 2.0 && amplitude.pass && support.pass;
    Ok(ResidualAmplitudeReport { patches, magnitude_band, amplitude, support, pass })
}
