//! U at a physical point (t, y), summing every scale in its own units.

use serde::Serialize;

use super::config::BlowupConfig;
use super::scaled::ScaledReal;
use crate::profiles::SmoothFn;
use crate::Error;

/// Largest argument evaluated directly; beyond it the far-field form is used.
const DIRECT_LIMIT: f64 = 50.0;
const MAX_SCALES: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Pruned {
    /// η(N_{s-1} t/δ) = 0.
    Cutoff,
    /// Neither t - r nor t + r meets the profile support (strong Huygens).
    Huygens,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScaleTerm {
    pub s: usize,
    pub value: [ScaledReal; 2],
    pub pruned: Option<Pruned>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PhysicalValue {
    pub value: [ScaledReal; 2],
    pub terms: Vec<ScaleTerm>,
}

impl PhysicalValue {
    pub fn is_zero(&self) -> bool {
        self.value.iter().all(|v| v.is_zero())
    }
}

/// U(t, y) = Σ_s N_s^{3/2} η(N_{s-1} t/δ) V(N_s t, N_s² y), s ≥ 1.
pub fn eval_physical(cfg: &BlowupConfig, t: &ScaledReal, y: &ScaledReal) -> Result<PhysicalValue, Error> {
    let n0 = cfg.n0;
    let r = y.sqrt();
    let bound = cfg.field.support_bound();
    let mut terms = Vec::new();
    let mut total = [ScaledReal::zero(n0); 2];
    for s in 1..=MAX_SCALES {
        let x = cfg.n(s - 1).mul(t).to_f64() / cfg.delta;
        let zero = [ScaledReal::zero(n0); 2];
        if x >= 2.0 {
            terms.push(ScaleTerm { s, value: zero, pruned: Some(Pruned::Cutoff) });
            // every later scale has a larger cutoff argument
            break;
        }
        let ns = cfg.n(s);
        let big_t = ns.mul(t);
        let big_r = ns.mul(&r);
        let sigma = big_t.sub(&big_r).to_f64();
        let plus = big_t.add(&big_r).to_f64();
        if sigma.abs() > bound && plus > bound {
            terms.push(ScaleTerm { s, value: zero, pruned: Some(Pruned::Huygens) });
            continue;
        }
        let eta = cfg.eta.value(x);
        let amp = ScaledReal::power(n0, cfg.q_of(s) * num_rational::Rational64::new(3, 2)).scale(eta);
        let v: [ScaledReal; 2] = if plus <= DIRECT_LIMIT {
            let (tt, rr) = (big_t.to_f64(), big_r.to_f64());
            let j = cfg.field.ty_jet(tt, rr * rr, 0)?;
            [0, 1].map(|c| ScaledReal::from_f64(j[c].value(), n0))
        } else {
            let m = cfg.field.far_ty_mantissas(sigma, 1.0 / big_r.to_f64(), 0);
            let decay = big_r.powi(-(cfg.k as i64));
            [0, 1].map(|c| decay.scale(m[c][0].value()))
        };
        let value = [amp.mul(&v[0]), amp.mul(&v[1])];
        total = [total[0].add(&value[0]), total[1].add(&value[1])];
        terms.push(ScaleTerm { s, value, pruned: None });
    }
    Ok(PhysicalValue { value: total, terms })
}
