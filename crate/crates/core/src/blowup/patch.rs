//! U and F on one rectangle R_i in renormalized units.
//!
//! A point is an f64 anchor (τ, ρ²) = (N_{i-1} t, N_{i-1}² y) plus offsets
//! (a, b) in the renormalized variables t̃ = N_i t, ỹ = N_i N_{i-1} y, so
//! t̃ = Λτ + a and ỹ = Λρ² + b with Λ = N_i/N_{i-1}. Values of Ũ are a
//! ScaledReal at the anchor plus an f64 jet in (a, b); derivatives in (a, b)
//! are the normalized derivatives (N_i^{-1}∂_t)^j (N_i^{-1}N_{i-1}^{-1}∂_y)^k.

use std::sync::Arc;

use num_rational::Rational64;
use serde::Serialize;

use super::config::{BlowupConfig, JetCache};
use super::scaled::ScaledReal;
use crate::freewave::FreeWaveField;
use crate::jet::factorial;
use crate::jet2::Jet2;
use crate::profiles::{Cutoff, SmoothFn};
use crate::Error;

/// Extra Taylor depth of the lower-scale terms; the dropped terms are
/// O(Λ^{-EXTRA}) relative.
const EXTRA: usize = 3;
/// Order of the cached jet of V at the origin.
const ORIGIN_ORDER: usize = 12;
pub const WIDEN: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Anchor {
    pub tau: f64,
    pub rho2: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PatchPoint {
    pub anchor: Anchor,
    pub a: f64,
    pub b: f64,
}

impl PatchPoint {
    pub fn at(tau: f64, rho2: f64) -> Self {
        PatchPoint { anchor: Anchor { tau, rho2 }, a: 0.0, b: 0.0 }
    }

    pub fn offset(&self, da: f64, db: f64) -> Self {
        PatchPoint { a: self.a + da, b: self.b + db, ..*self }
    }
}

/// R_i (c = 1) or R_{i,C} in anchor coordinates.
#[derive(Clone, Debug, Serialize)]
pub struct PatchRect {
    pub i: usize,
    pub c: f64,
    pub tau: (f64, f64),
    pub rho2: (f64, f64),
}

impl PatchRect {
    pub fn standard(cfg: &BlowupConfig, i: usize) -> Self {
        let d = cfg.delta;
        PatchRect { i, c: 1.0, tau: (d, 2.0 * d), rho2: ((d / 2.0).powi(2), (3.0 * d).powi(2)) }
    }

    pub fn widened(cfg: &BlowupConfig, i: usize, c: f64) -> Self {
        let d = cfg.delta;
        PatchRect { i, c, tau: (d / c, c * d), rho2: (0.0, (c * d).powi(2)) }
    }

    pub fn contains(&self, a: &Anchor) -> bool {
        let tol = 1e-12 * self.tau.1;
        a.tau >= self.tau.0 - tol
            && a.tau <= self.tau.1 + tol
            && a.rho2 >= self.rho2.0 - tol * tol
            && a.rho2 <= self.rho2.1 * (1.0 + 1e-12)
    }

    /// Physical t-interval [δ/(C N_{i-1}), Cδ/N_{i-1}].
    pub fn physical_t(&self, cfg: &BlowupConfig) -> (ScaledReal, ScaledReal) {
        let n = cfg.n(self.i - 1);
        let lo = ScaledReal::from_f64(self.tau.0, cfg.n0).div(&n);
        let hi = ScaledReal::from_f64(self.tau.1, cfg.n0).div(&n);
        (lo, hi)
    }

    /// Renormalized t̃-interval Λ·[τ_lo, τ_hi].
    pub fn renormalized_t(&self, cfg: &BlowupConfig) -> (ScaledReal, ScaledReal) {
        let l = cfg.lambda(self.i);
        (l.scale(self.tau.0), l.scale(self.tau.1))
    }

    /// n × n anchors, τ-major.
    pub fn grid(&self, n: usize) -> Vec<Anchor> {
        let lin = |r: (f64, f64), j: usize| r.0 + (r.1 - r.0) * j as f64 / (n - 1) as f64;
        (0..n)
            .flat_map(|p| (0..n).map(move |q| (p, q)))
            .map(|(p, q)| Anchor { tau: lin(self.tau, p), rho2: lin(self.rho2, q) })
            .collect()
    }
}

/// Ũ = base + delta(a, b).
#[derive(Clone, Debug)]
pub struct UJet {
    pub base: [ScaledReal; 2],
    pub delta: [Jet2; 2],
}

impl UJet {
    pub fn value(&self) -> [ScaledReal; 2] {
        let n0 = self.base[0].n0;
        [0, 1].map(|c| self.base[c].add(&ScaledReal::from_f64(self.delta[c].value(), n0)))
    }

    /// J[c][v]: derivative of component c along a (v = 0) or b (v = 1).
    pub fn jacobian(&self) -> [[f64; 2]; 2] {
        [0, 1].map(|c| [self.delta[c].derivative(1, 0), self.delta[c].derivative(0, 1)])
    }

    pub fn wedge(&self) -> f64 {
        let j = self.jacobian();
        j[0][0] * j[1][1] - j[0][1] * j[1][0]
    }
}

/// F̃ = scale · Φ with scale = N_{i-1}^{-1/4} exactly.
#[derive(Clone, Debug)]
pub struct FJet {
    pub scale: ScaledReal,
    pub phi: [Jet2; 2],
    /// |η'-term| and δ^{-2}|V η''| (the η''-term without its Λ^{-1}).
    pub first_term: f64,
    pub second_term_raw: f64,
}

impl FJet {
    pub fn is_zero(&self) -> bool {
        self.phi.iter().all(|j| j.max_abs() == 0.0)
    }
}

#[derive(Clone, Debug)]
struct LowerTerm {
    s: usize,
    amp: ScaledReal,
    /// N_s / N_{i-1} as a float (0 when it underflows).
    arg: f64,
    /// A_s μ^α ν^β, μ = N_s/N_i, ν = N_s²/(N_i N_{i-1}).
    coef: Vec<Vec<f64>>,
    /// The same times Λ^{α+β-1}: exactly 1 for s = i-1.
    norm: Vec<Vec<f64>>,
}

#[derive(Clone, Debug)]
pub struct PatchMaps {
    pub i: usize,
    pub delta: f64,
    pub lambda: ScaledReal,
    pub lambda_inv: f64,
    /// Exponent of the N_{i-1}^{3/2} amplitude of Ũ.
    pub dominant_scale_log: Rational64,
    pub f_scale: ScaledReal,
    /// N_i^{3/2} Λ^{-k} as a float: the size of the scale-i term of Ũ.
    pub strip_amplitude: ScaledReal,
    strip_u: f64,
    pub rect: PatchRect,
    pub widened: PatchRect,
    terms: Vec<LowerTerm>,
    origin: [Jet2; 2],
    field: Arc<FreeWaveField>,
    cache: Arc<JetCache>,
    eta: Cutoff,
    k: usize,
}

impl PatchMaps {
    pub fn new(cfg: &BlowupConfig, i: usize) -> Result<Self, Error> {
        if i < 2 || i > cfg.i_max {
            return Err(Error::Config(format!("patch index {i} outside 2..={}", cfg.i_max)));
        }
        let n0 = cfg.n0;
        let k = cfg.k;
        let three_halves = Rational64::new(3, 2);
        let lambda = cfg.lambda(i);
        let mut terms = Vec::new();
        for s in 1..i {
            let ns = cfg.n(s);
            let amp = ScaledReal::power(n0, cfg.q_of(s) * three_halves);
            let mu = ns.div(&cfg.n(i));
            let nu = ns.mul(&ns).div(&cfg.n(i).mul(&cfg.n(i - 1)));
            let table = |extra: &dyn Fn(usize) -> ScaledReal| -> Vec<Vec<f64>> {
                (0..=ORIGIN_ORDER)
                    .map(|al| {
                        (0..=ORIGIN_ORDER - al)
                            .map(|be| {
                                let c = amp.mul(&mu.powi(al as i64)).mul(&nu.powi(be as i64));
                                if al + be == 0 { 0.0 } else { c.mul(&extra(al + be)).to_f64() }
                            })
                            .collect()
                    })
                    .collect()
            };
            let coef = table(&|_| ScaledReal::from_f64(1.0, n0));
            let norm = table(&|n| lambda.powi(n as i64 - 1));
            terms.push(LowerTerm { s, amp, arg: ns.div(&cfg.n(i - 1)).to_f64(), coef, norm });
        }
        let field = cfg.field.clone();
        let origin = field.ty_jet(0.0, 0.0, ORIGIN_ORDER)?;
        let strip_amplitude =
            ScaledReal::power(n0, cfg.q_of(i) * three_halves - cfg.lambda_q(i) * k as i64);
        Ok(PatchMaps {
            i,
            delta: cfg.delta,
            lambda_inv: ScaledReal::from_f64(1.0, n0).div(&lambda).to_f64(),
            lambda,
            dominant_scale_log: cfg.q_of(i - 1) * three_halves,
            f_scale: ScaledReal::power(n0, cfg.q_of(i - 1) * Rational64::new(-1, 4)),
            strip_u: strip_amplitude.to_f64(),
            strip_amplitude,
            rect: PatchRect::standard(cfg, i),
            widened: PatchRect::widened(cfg, i, WIDEN),
            terms,
            origin,
            field,
            cache: cfg.cache.clone(),
            eta: cfg.eta.clone(),
            k,
        })
    }
}

impl PatchMaps {
    fn check(&self, p: &PatchPoint, order: usize) -> Result<(), Error> {
        if !self.widened.contains(&p.anchor) {
            return Err(Error::OutsidePatch(format!(
                "anchor ({}, {}) outside R_{{{},{}}}",
                p.anchor.tau, p.anchor.rho2, self.i, WIDEN
            )));
        }
        if order + EXTRA > ORIGIN_ORDER {
            return Err(Error::OrderOverflow { requested: order, available: ORIGIN_ORDER - EXTRA });
        }
        Ok(())
    }

    /// Jet in a of η^{(shift)}((τ + a/Λ)/δ).
    fn eta_jet(&self, p: &PatchPoint, shift: usize, order: usize) -> Jet2 {
        let x = (p.anchor.tau + p.a * self.lambda_inv) / self.delta;
        let h = self.lambda_inv / self.delta;
        let j = self.eta.jet(x, order + shift).differentiate(shift);
        let tc = j.taylor().iter().enumerate().map(|(n, c)| c * h.powi(n as i32)).collect();
        Jet2::from_u(&crate::jet::Jet::from_taylor(x, tc), order)
    }

    /// Σ = Λ(τ - ρ) + a - b/(ρ + ρ̂): the light-cone coordinate of scale i.
    fn sigma(&self, p: &PatchPoint) -> Option<(f64, f64)> {
        let rho = p.anchor.rho2.sqrt();
        let rho_hat = (p.anchor.rho2 + p.b * self.lambda_inv).max(0.0).sqrt();
        if rho_hat == 0.0 {
            return None;
        }
        let diff = p.anchor.tau - rho;
        let far = if diff == 0.0 { 0.0 } else { self.lambda.scale(diff).to_f64() };
        let s = far + p.a - p.b / (rho + rho_hat);
        (s.is_finite() && s.abs() <= self.field.support_bound()).then_some((s, rho_hat))
    }

    /// V(t_i, y_i) at scale i as a jet in (a, b), without the amplitude
    /// N_i^{3/2}Λ^{-k}; `None` where it vanishes identically.
    fn strip_w(&self, p: &PatchPoint, order: usize) -> Option<[Jet2; 2]> {
        let (s, rho_hat) = self.sigma(p)?;
        let m = self.field.far_ty_mantissas(s, self.lambda_inv / rho_hat, order);
        Some([0, 1].map(|c| {
            let mut w = Jet2::zero(order);
            for be in 0..=order {
                let f = rho_hat.powi(-((self.k + be) as i32)) / factorial(be);
                for (al, t) in m[c][be].taylor().iter().enumerate().take(order - be + 1) {
                    w.set(al, be, f * t);
                }
            }
            w
        }))
    }

    /// V-jets of every lower scale at its own argument.
    fn term_jets(&self, an: &Anchor, depth: usize) -> Result<Vec<[Jet2; 2]>, Error> {
        self.terms
            .iter()
            .map(|term| {
                if term.s + 1 == self.i {
                    self.cache.ty_jet(&self.field, an.tau, an.rho2, depth)
                } else {
                    let (x, y) = (term.arg * an.tau, term.arg * term.arg * an.rho2);
                    Ok([self.origin[0].shift(x, y), self.origin[1].shift(x, y)])
                }
            })
            .collect()
    }

    /// Lower-scale part of Ũ at an anchor with the order-n coefficients
    /// multiplied by Λ^{n-1}: the mantissa of each normalized derivative at
    /// its forced exponent q = (1-n)·(3/2)(5/2)^{i-1}. The value slot is 0.
    pub fn lower_mantissas(&self, an: &Anchor, order: usize) -> Result<[Jet2; 2], Error> {
        self.check(&PatchPoint { anchor: *an, a: 0.0, b: 0.0 }, order)?;
        let mut out = [Jet2::zero(order), Jet2::zero(order)];
        for (term, jet) in self.terms.iter().zip(self.term_jets(an, order)?) {
            for c in 0..2 {
                for al in 0..=order {
                    for be in 0..=order - al {
                        if al + be > 0 {
                            let v = out[c].coeff(al, be) + term.norm[al][be] * jet[c].coeff(al, be);
                            out[c].set(al, be, v);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// η·W at a point: the scale-i part of Ũ divided by its exact amplitude
    /// N_i^{3/2}Λ^{-k} = N_{i-1}^{-15/4}.
    pub fn strip_mantissas(&self, p: &PatchPoint, order: usize) -> Option<[Jet2; 2]> {
        let w = self.strip_w(p, order)?;
        let eta = self.eta_jet(p, 0, order);
        Some([&w[0] * &eta, &w[1] * &eta])
    }

    /// W alone, for the free-wave part of the residual check.
    pub fn strip_wave(&self, p: &PatchPoint, order: usize) -> Option<[Jet2; 2]> {
        self.strip_w(p, order)
    }

    /// (η - η(τ/δ))/Λ^{-1} at offset a, from the Taylor jet of η so the
    /// difference carries no cancellation.
    pub fn eta_increment(&self, tau: f64, a: f64) -> f64 {
        let x = tau / self.delta;
        let order = 10;
        let j = self.eta.jet(x, order);
        let h = a / self.delta;
        (1..=order)
            .map(|n| j.taylor()[n] * h.powi(n as i32) * self.lambda_inv.powi(n as i32 - 1))
            .sum()
    }

    /// Λ(η(point + a) - η(point)) along a, for the commutator check.
    pub fn eval_increment(&self, p: &PatchPoint, da: f64) -> f64 {
        self.eta_increment(p.anchor.tau + p.a * self.lambda_inv, da)
    }

    pub fn eval_u(&self, p: &PatchPoint, order: usize) -> Result<UJet, Error> {
        self.check(p, order)?;
        let depth = order + EXTRA;
        let n0 = self.lambda.n0;
        let mut base = [ScaledReal::zero(n0); 2];
        let mut delta = [Jet2::zero(order), Jet2::zero(order)];
        for (term, jet) in self.terms.iter().zip(self.term_jets(&p.anchor, depth)?) {
            for c in 0..2 {
                base[c] = base[c].add(&term.amp.scale(jet[c].value()));
                let mut poly = Jet2::zero(depth);
                for al in 0..=depth {
                    for be in 0..=depth - al {
                        if al + be > 0 {
                            poly.set(al, be, term.coef[al][be] * jet[c].coeff(al, be));
                        }
                    }
                }
                delta[c] = &delta[c] + &poly.shift(p.a, p.b).truncate(order);
            }
        }
        if let Some(w) = self.strip_w(p, order) {
            let eta = self.eta_jet(p, 0, order);
            for c in 0..2 {
                delta[c] = &delta[c] + &(&w[c] * &eta).scale(self.strip_u);
            }
        }
        Ok(UJet { base, delta })
    }

    /// F̃ = N_{i-1}^{-1/4} Φ, Φ = -(2/δ) η' ∂_aW - Λ^{-1} δ^{-2} η'' W.
    pub fn eval_f(&self, p: &PatchPoint, order: usize) -> Result<FJet, Error> {
        self.check(p, order)?;
        let zero = || FJet {
            scale: self.f_scale,
            phi: [Jet2::zero(order), Jet2::zero(order)],
            first_term: 0.0,
            second_term_raw: 0.0,
        };
        let Some(w) = self.strip_w(p, order + 1) else { return Ok(zero()) };
        let e1 = self.eta_jet(p, 1, order);
        let e2 = self.eta_jet(p, 2, order);
        let d = self.delta;
        let mut out = zero();
        for c in 0..2 {
            let first = (&w[c].diff_u() * &e1).scale(-2.0 / d);
            let second = (&w[c].truncate(order) * &e2).scale(-1.0 / (d * d));
            out.first_term = out.first_term.max(first.value().abs());
            out.second_term_raw = out.second_term_raw.max(second.value().abs());
            out.phi[c] = &first + &second.scale(self.lambda_inv);
        }
        Ok(out)
    }

    pub fn epsilon(&self) -> f64 {
        self.field.epsilon
    }

    pub fn support_bound(&self) -> f64 {
        self.field.support_bound()
    }

    pub fn strip_hit(&self, p: &PatchPoint) -> bool {
        self.sigma(p).is_some()
    }

    pub fn lower_scales(&self) -> Vec<(usize, ScaledReal)> {
        self.terms.iter().map(|t| (t.s, t.amp)).collect()
    }
}
