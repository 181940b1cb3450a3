//! v₂ through its spectral representation
//! v₂(t, r) = (2π)^{-d} ∫ ŵ(ρ) cos(tρ) K(rρ) ρ^{d-1} dρ,
//! K(z) = (2π)^{d/2} sqrt(2/π) κ_{k-1}(z), ŵ = ĥ².

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use super::bump::RadialBump;
use crate::jet::factorial;
use crate::jet2::Jet2;
use crate::quad;
use crate::special::{double_factorial_odd, kappa_range};
use crate::Error;

const GL_NODES: usize = 20;

/// Nodes, weights and spectrum values on [0, P] for one frequency tier.
#[derive(Debug)]
struct Tier {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    spectrum: Vec<f64>,
}

#[derive(Debug)]
pub struct SpectralWave {
    pub d: usize,
    pub epsilon: f64,
    pub cutoff: f64,
    pub w_at_zero: f64,
    pub tail_bound: f64,
    bump: RadialBump,
    tiers: Mutex<HashMap<u32, Arc<Tier>>>,
}

impl SpectralWave {
    pub fn new(d: usize, epsilon: f64) -> Result<Self, Error> {
        Self::with_power(d, epsilon, super::bump::BUMP_POWER)
    }

    pub fn with_power(d: usize, epsilon: f64, m: usize) -> Result<Self, Error> {
        if d % 2 == 0 || d < 3 {
            return Err(Error::UnsupportedDimension(d as i64));
        }
        let k = (d - 1) / 2;
        let bump = RadialBump::with_power(k, epsilon / 2.0, m);
        // envelope of ŵ(ρ)/ŵ(0) is ((2n+1)!! z^{-n-1})², n = k + m, z = ρ₀ρ
        let n = bump.k + bump.m;
        let lnc = double_factorial_odd(n).ln();
        let envelope = |z: f64| (2.0 * (lnc - (n + 1) as f64 * z.ln()) + d as f64 * z.ln()).exp();
        let mut z = n as f64;
        while envelope(z) > 1e-14 {
            z *= 1.05;
        }
        let mut w = SpectralWave {
            d,
            epsilon,
            cutoff: z / bump.radius,
            w_at_zero: 0.0,
            tail_bound: envelope(z),
            bump,
            tiers: Mutex::new(HashMap::new()),
        };
        w.w_at_zero = w.ty_jet(0.0, 0.0, 0)?.value();
        if !(w.w_at_zero > 0.0) {
            return Err(Error::Quadrature(format!("w(0) = {}", w.w_at_zero)));
        }
        Ok(w)
    }

    pub fn k(&self) -> usize {
        (self.d - 1) / 2
    }

    pub fn bump(&self) -> &RadialBump {
        &self.bump
    }

    /// ŵ(ρ) = ĥ(ρ)².
    pub fn spectrum(&self, rho: f64) -> f64 {
        self.bump.fourier(rho).powi(2)
    }

    fn tier(&self, omega: f64) -> Arc<Tier> {
        let level = omega.max(1.0).log2().ceil().max(0.0) as u32;
        let mut guard = self.tiers.lock().expect("spectral cache poisoned");
        guard
            .entry(level)
            .or_insert_with(|| {
                let om = 2f64.powi(level as i32) + 2.0 * self.bump.radius;
                let panels = ((self.cutoff * om / 12.0).ceil() as usize).max(8);
                let width = self.cutoff / panels as f64;
                let mut tier = Tier { nodes: vec![], weights: vec![], spectrum: vec![] };
                for p in 0..panels {
                    for (x, wt) in quad::mapped(p as f64 * width, (p + 1) as f64 * width, GL_NODES) {
                        tier.nodes.push(x);
                        tier.weights.push(wt);
                        tier.spectrum.push(self.spectrum(x));
                    }
                }
                Arc::new(tier)
            })
            .clone()
    }

    /// Spectrum nodes and values of the base tier.
    pub fn base_grid(&self) -> Vec<(f64, f64)> {
        let t = self.tier(1.0);
        t.nodes.iter().copied().zip(t.spectrum.iter().copied()).collect()
    }

    /// Jet of V₂(t, y) = v₂(t, √y) in (t, y) by differentiating under the
    /// integral: ∂_t^a ∂_y^m inserts ρ^a cos(tρ + aπ/2) (-ρ²/2)^m κ_{k-1+m}.
    pub fn ty_jet(&self, t: f64, y: f64, order: usize) -> Result<Jet2, Error> {
        if order > 12 {
            return Err(Error::OrderOverflow { requested: order, available: 12 });
        }
        let k = self.k();
        let r = y.max(0.0).sqrt();
        let tier = self.tier(t.abs() + r);
        let pi = std::f64::consts::PI;
        let pref = (2.0 * pi).powi(-(self.d as i32))
            * (2.0 * pi).powf(self.d as f64 / 2.0)
            * (2.0 / pi).sqrt();
        let mut acc = vec![0.0; (order + 1) * (order + 1)];
        for ((&rho, &wt), &s) in tier.nodes.iter().zip(&tier.weights).zip(&tier.spectrum) {
            let base = wt * s * rho.powi(self.d as i32 - 1) * pref;
            let kap = kappa_range(k - 1, order + 1, r * rho);
            let (sn, cs) = (t * rho).sin_cos();
            for a in 0..=order {
                let trig = match a % 4 {
                    0 => cs,
                    1 => -sn,
                    2 => -cs,
                    _ => sn,
                } * rho.powi(a as i32);
                for m in 0..=(order - a) {
                    acc[a * (order + 1) + m] +=
                        base * trig * (-0.5 * rho * rho).powi(m as i32) * kap[m];
                }
            }
        }
        let mut j = Jet2::zero(order);
        for a in 0..=order {
            for m in 0..=(order - a) {
                j.set(a, m, acc[a * (order + 1) + m] / (factorial(a) * factorial(m)));
            }
        }
        Ok(j)
    }

    /// (2π)^{-d} ∫ ŵ |ξ|² dξ, so that ∂_tt v₂(0, 0) = -second_moment.
    pub fn second_moment(&self) -> f64 {
        let tier = self.tier(1.0);
        let pi = std::f64::consts::PI;
        let area = 2.0 * pi.powf(self.d as f64 / 2.0)
            / crate::freewave::bump::ln_gamma(self.d as f64 / 2.0).exp();
        let s: f64 = tier
            .nodes
            .iter()
            .zip(&tier.weights)
            .zip(&tier.spectrum)
            .map(|((&rho, &w), &sp)| w * sp * rho.powi(self.d as i32 + 1))
            .sum();
        (2.0 * pi).powi(-(self.d as i32)) * area * s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freewave::bump::ConvolvedProfile;
    use crate::freewave::ladder;

    #[test]
    fn normalization_and_time_symmetry() {
        let w = SpectralWave::new(11, 0.035).unwrap();
        assert!((w.w_at_zero - 1.0).abs() < 1e-10, "{}", w.w_at_zero);
        assert!(w.base_grid().iter().all(|&(_, s)| s >= 0.0));
        let j = w.ty_jet(0.0, 0.0, 2).unwrap();
        assert!(j.derivative(1, 0).abs() < 1e-12 * w.second_moment());
        assert!((j.derivative(2, 0) + w.second_moment()).abs() < 1e-9 * w.second_moment());
    }

    #[test]
    fn agrees_with_convolved_ladder() {
        let w = SpectralWave::new(11, 0.035).unwrap();
        let g = ConvolvedProfile::new(w.bump().clone());
        for &(t, y) in &[(0.0, 0.0), (0.01, 1e-4), (0.3, 0.08), (0.5, 0.27), (1.0, 0.98)] {
            let a = w.ty_jet(t, y, 2).unwrap();
            let b = ladder::ty_jet(&g, 5, t, y, 2, 0.25).unwrap();
            for (p, q) in [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)] {
                let scale = (0.035f64).powi(-(p as i32 + 2 * q as i32));
                let (x, z) = (a.derivative(p, q), b.derivative(p, q));
                assert!((x - z).abs() < 1e-9 * scale, "({t},{y}) d{p}{q}: {x} vs {z}");
            }
        }
    }
}
