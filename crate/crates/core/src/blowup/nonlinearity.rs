//! f = F̃ ∘ Ũ^{-1} on one patch: Newton inversion of Ũ, local inverse jets
//! and the tabulated graph of f.

use rayon::prelude::*;
use serde::Serialize;

use super::certify::{strip_points, DERIV_ORDER};
use super::patch::{Anchor, PatchMaps, PatchPoint};
use super::scaled::ScaledReal;
use crate::jet2::Jet2;
use crate::Error;

pub const LOOKUP: usize = 32;
pub const MAX_ITER: usize = 50;
pub const RESIDUAL_TOL: f64 = 1e-10;

/// 32×32 image-to-domain table over R̃_{i,C}, stored in anchor units
/// D = (Ũ - Ũ(ref))/Λ.
pub struct Lookup {
    reference: [ScaledReal; 2],
    anchors: Vec<Anchor>,
    images: Vec<[f64; 2]>,
    spread: [f64; 2],
}

impl Lookup {
    pub fn new(pm: &PatchMaps) -> Result<Self, Error> {
        let anchors = pm.widened.grid(LOOKUP);
        let values: Vec<[ScaledReal; 2]> = anchors
            .par_iter()
            .map(|an| pm.eval_u(&PatchPoint { anchor: *an, a: 0.0, b: 0.0 }, 0).map(|u| u.value()))
            .collect::<Result<_, _>>()?;
        let reference = values[0];
        let images: Vec<[f64; 2]> = values.iter().map(|v| reduce(pm, v, &reference)).collect();
        let spread = [0, 1].map(|c| {
            let (lo, hi) = images.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, x| (a.0.min(x[c]), a.1.max(x[c])));
            (hi - lo).max(f64::MIN_POSITIVE)
        });
        Ok(Lookup { reference, anchors, images, spread })
    }

    fn nearest(&self, d: &[f64; 2]) -> Anchor {
        let dist = |x: &[f64; 2]| ((x[0] - d[0]) / self.spread[0]).hypot((x[1] - d[1]) / self.spread[1]);
        let k = (0..self.images.len())
            .min_by(|&p, &q| dist(&self.images[p]).total_cmp(&dist(&self.images[q])))
            .unwrap_or(0);
        self.anchors[k]
    }
}

fn reduce(pm: &PatchMaps, v: &[ScaledReal; 2], reference: &[ScaledReal; 2]) -> [f64; 2] {
    [0, 1].map(|c| v[c].sub(&reference[c]).div(&pm.lambda).to_f64())
}

fn solve(j: &[[f64; 2]; 2], r: [f64; 2]) -> [f64; 2] {
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    [(j[1][1] * r[0] - j[0][1] * r[1]) / det, (j[0][0] * r[1] - j[1][0] * r[0]) / det]
}

#[derive(Clone, Debug, Serialize)]
pub struct Inversion {
    pub anchor: Anchor,
    pub iterations: usize,
    /// |target - Ũ| / |target| at the returned anchor.
    pub residual: f64,
}

/// Damped Newton in anchor coordinates: Δ(τ, ρ²) = J⁻¹ (target - Ũ)/Λ, since
/// ∂_τ = Λ∂_a and ∂_{ρ²} = Λ∂_b.
pub fn invert_u(pm: &PatchMaps, lookup: &Lookup, target: &[ScaledReal; 2]) -> Result<Inversion, Error> {
    let goal = reduce(pm, target, &lookup.reference);
    let mut an = lookup.nearest(&goal);
    let size = target[0].abs().add(&target[1].abs());
    let rel = |u: &[ScaledReal; 2]| {
        let e = [0, 1].map(|c| target[c].sub(&u[c]));
        e[0].abs().add(&e[1].abs()).div(&size).to_f64()
    };
    let scale = pm.widened.tau.1;
    let mut u = pm.eval_u(&PatchPoint { anchor: an, a: 0.0, b: 0.0 }, 1)?;
    let mut res = rel(&u.value());
    for it in 1..=MAX_ITER {
        let r = [0, 1].map(|c| target[c].sub(&u.value()[c]).div(&pm.lambda).to_f64());
        let step = solve(&u.jacobian(), r);
        let mut damp = 1.0;
        let mut accepted = false;
        while damp > 1e-6 {
            let next = Anchor { tau: an.tau + damp * step[0], rho2: (an.rho2 + damp * step[1]).max(0.0) };
            if pm.widened.contains(&next) {
                let un = pm.eval_u(&PatchPoint { anchor: next, a: 0.0, b: 0.0 }, 1)?;
                let rn = rel(&un.value());
                if rn < res {
                    an = next;
                    u = un;
                    res = rn;
                    accepted = true;
                    break;
                }
            }
            damp *= 0.5;
        }
        let small = step[0].abs() / scale + step[1].abs() / (scale * scale) <= 1e-12;
        if res <= RESIDUAL_TOL && (small || !accepted) {
            return Ok(Inversion { anchor: an, iterations: it, residual: res });
        }
        if !accepted {
            break;
        }
    }
    Err(Error::NoConvergence { iterations: MAX_ITER, residual: res })
}

/// Offsets (a, b) at a fixed anchor with Ũ(anchor + (a, b)) = Ũ(anchor) + w.
pub fn invert_local(pm: &PatchMaps, anchor: Anchor, w: [f64; 2]) -> Result<(f64, f64, usize), Error> {
    let (mut a, mut b) = (0.0, 0.0);
    let size = w[0].abs() + w[1].abs() + 1.0;
    for it in 1..=MAX_ITER {
        let u = pm.eval_u(&PatchPoint { anchor, a, b }, 1)?;
        let r = [w[0] - u.delta[0].value(), w[1] - u.delta[1].value()];
        let err = (r[0].abs() + r[1].abs()) / size;
        let s = solve(&u.jacobian(), r);
        a += s[0];
        b += s[1];
        if err <= 1e-15 || s[0].abs() + s[1].abs() <= 1e-15 * (1.0 + a.abs() + b.abs()) {
            return Ok((a, b, it));
        }
    }
    Err(Error::NoConvergence { iterations: MAX_ITER, residual: f64::NAN })
}

/// Jets Q with D(Q(w)) = D(0) + w to the order of `d`, by the fixed point
/// Q = J⁻¹(w - N(Q)) where N collects the terms of D of order ≥ 2.
pub fn inverse_jet(d: &[Jet2; 2]) -> [Jet2; 2] {
    let n = d[0].order().min(d[1].order());
    let j = [[d[0].coeff(1, 0), d[0].coeff(0, 1)], [d[1].coeff(1, 0), d[1].coeff(0, 1)]];
    let nonlinear = [0, 1].map(|c| {
        let mut x = d[c].truncate(n);
        x.set(0, 0, 0.0);
        x.set(1, 0, 0.0);
        x.set(0, 1, 0.0);
        x
    });
    let w = [Jet2::variable(0.0, false, n), Jet2::variable(0.0, true, n)];
    let apply = |r: [Jet2; 2]| {
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        [
            &r[0].scale(j[1][1] / det) - &r[1].scale(j[0][1] / det),
            &r[1].scale(j[0][0] / det) - &r[0].scale(j[1][0] / det),
        ]
    };
    let mut q = apply(w.clone());
    for _ in 1..n {
        let nq = [nonlinear[0].compose(&q[0], &q[1]), nonlinear[1].compose(&q[0], &q[1])];
        q = apply([&w[0] - &nq[0], &w[1] - &nq[1]]);
    }
    q
}

#[derive(Clone, Debug, Serialize)]
pub struct FSample {
    pub point: PatchPoint,
    pub u: [ScaledReal; 2],
    pub f: [ScaledReal; 2],
    /// |F̃(Ũ⁻¹(Ũ(p))) - F̃(p)| relative to max(|F̃(p)|, 1e-6 sup|F̃|).
    pub round_trip: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct NonlinearityPatch {
    pub i: usize,
    /// f derivatives in absolute u-units, orders 0..=3, as mantissas at
    /// q = -(1/4)(5/2)^{i-1}.
    pub sups: Vec<f64>,
    /// log10 of sup|F| in absolute units.
    pub log10_sup_f: f64,
    /// log10 N_{i-1}.
    pub log10_n_prev: f64,
    pub round_trip_max: f64,
    pub inverse_check: f64,
    pub samples: Vec<FSample>,
    pub pass: bool,
}

pub const ROUND_TRIP_TOL: f64 = 1e-8;

fn to_f(pm: &PatchMaps, phi: &[Jet2; 2]) -> [ScaledReal; 2] {
    [0, 1].map(|c| pm.f_scale.scale(phi[c].value()))
}

/// Tabulates f on the image of the cone samples and of a coarse grid of R_i
/// (where F̃ vanishes), with order-3 derivative jets of F̃ ∘ Ũ⁻¹.
pub fn assemble_f(pm: &PatchMaps, grid: usize) -> Result<NonlinearityPatch, Error> {
    let reach = pm_support(pm);
    let mut points = strip_points(pm, 64, 33, reach);
    points.extend(pm.rect.grid(grid).into_iter().map(|an| PatchPoint { anchor: an, a: 0.0, b: 0.0 }));
    let rows: Vec<(FSample, Jet2, Jet2, f64)> = points
        .par_iter()
        .map(|p| -> Result<_, Error> {
            let u = pm.eval_u(p, DERIV_ORDER)?;
            let f = pm.eval_f(p, DERIV_ORDER)?;
            // jets of D about the anchor offset (a, b), then the inverse series
            let q = inverse_jet(&u.delta);
            let back = [u.delta[0].compose(&q[0], &q[1]), u.delta[1].compose(&q[0], &q[1])];
            let id_err = (0..2)
                .map(|c| {
                    let mut e = back[c].clone();
                    e.set(0, 0, 0.0);
                    let want = if c == 0 { (1, 0) } else { (0, 1) };
                    e.set(want.0, want.1, e.coeff(want.0, want.1) - 1.0);
                    e.max_abs()
                })
                .fold(0.0, f64::max);
            let fq = [f.phi[0].compose(&q[0], &q[1]), f.phi[1].compose(&q[0], &q[1])];
            let (a, b, _) = invert_local(pm, p.anchor, [u.delta[0].value(), u.delta[1].value()])?;
            let f2 = pm.eval_f(&PatchPoint { anchor: p.anchor, a, b }, 0)?;
            let diff = (f2.phi[0].value() - f.phi[0].value()).hypot(f2.phi[1].value() - f.phi[1].value());
            let sample = FSample { point: *p, u: u.value(), f: to_f(pm, &f.phi), round_trip: diff };
            let [f0, f1] = fq;
            Ok((sample, f0, f1, id_err))
        })
        .collect::<Result<_, _>>()?;
    let sups: Vec<f64> = (0..=DERIV_ORDER)
        .map(|n| {
            rows.iter()
                .map(|r| r.1.max_derivative_of_order(n).max(r.2.max_derivative_of_order(n)))
                .fold(0.0, f64::max)
        })
        .collect();
    let sup0 = sups[0];
    let mut samples = Vec::with_capacity(rows.len());
    let mut round_trip_max: f64 = 0.0;
    let mut inverse_check: f64 = 0.0;
    for (mut s, f0, f1, id) in rows {
        let mag = f0.value().hypot(f1.value());
        s.round_trip /= mag.max(1e-6 * sup0).max(f64::MIN_POSITIVE);
        round_trip_max = round_trip_max.max(s.round_trip);
        inverse_check = inverse_check.max(id);
        samples.push(s);
    }
    let log10_sup_f = pm.f_scale.log10_abs() + sup0.log10();
    let log10_n_prev = pm.lambda.log10_abs() / 1.5;
    let pass = sups.iter().all(|s| s.is_finite()) && round_trip_max <= ROUND_TRIP_TOL && inverse_check <= 1e-8;
    Ok(NonlinearityPatch { i: pm.i, sups, log10_sup_f, log10_n_prev, round_trip_max, inverse_check, samples, pass })
}

fn pm_support(pm: &PatchMaps) -> f64 {
    pm.support_bound() + 0.1
}

pub const SLOPE: f64 = -0.25;
pub const SLOPE_TOL: f64 = 0.3;

#[derive(Clone, Debug, Serialize)]
pub struct NonlinearityReport {
    pub delta: f64,
    pub patches: Vec<NonlinearityPatch>,
    /// Bands across i of the f-derivative mantissas, orders 0..=3.
    pub bands: Vec<f64>,
    /// Least-squares slope of log sup|F| against log N_{i-1}.
    pub slope: f64,
    pub round_trip_max: f64,
    pub pass: bool,
}

pub fn nonlinearity_cascade(cfg: &super::config::BlowupConfig, grid: usize) -> Result<NonlinearityReport, Error> {
    let patches: Vec<NonlinearityPatch> = (2..=cfg.i_max)
        .map(|i| PatchMaps::new(cfg, i).and_then(|pm| assemble_f(&pm, grid)))
        .collect::<Result<_, _>>()?;
    let bands = (0..=DERIV_ORDER)
        .map(|n| super::certify::band(&patches.iter().map(|p| p.sups[n]).collect::<Vec<_>>()))
        .collect::<Vec<_>>();
    let xs: Vec<f64> = patches.iter().map(|p| p.log10_n_prev).collect();
    let ys: Vec<f64> = patches.iter().map(|p| p.log10_sup_f).collect();
    let slope = fit_slope(&xs, &ys);
    let round_trip_max = patches.iter().map(|p| p.round_trip_max).fold(0.0, f64::max);
    let pass = patches.iter().all(|p| p.pass)
        && bands.iter().all(|b| *b <= super::certify::BAND)
        && (slope - SLOPE).abs() <= SLOPE_TOL * SLOPE.abs();
    Ok(NonlinearityReport { delta: cfg.delta, patches, bands, slope, round_trip_max, pass })
}

pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// f_table.csv rows: i, u1, u2, f1, f2 as mantissa and q.
pub fn write_f_table<W: std::io::Write>(out: W, patches: &[NonlinearityPatch]) -> Result<(), Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["i", "u1_mantissa", "u1_q", "u2_mantissa", "u2_q", "f1_mantissa", "f1_q", "f2_mantissa", "f2_q"])
        .map_err(csv_err)?;
    for p in patches {
        for s in &p.samples {
            let mut row = vec![p.i.to_string()];
            for v in s.u.iter().chain(s.f.iter()) {
                row.push(format!("{:.17e}", v.mantissa));
                row.push(v.q.to_string());
            }
            w.write_record(&row).map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}
