use std::sync::Arc;

use super::ladder::{self, far_field_mantissa, radial_jet};
use crate::jet::{factorial, Jet};
use crate::jet2::Jet2;
use crate::profiles::SmoothFn;
use crate::Error;

pub const SERIES_THRESHOLD: f64 = 0.25;

/// Radial wave L_k[h](t, r) in dimension 2k+1 generated by a profile h.
#[derive(Clone)]
pub struct RadialWaveScalar {
    profile: Arc<dyn SmoothFn>,
    k: usize,
    series_threshold: f64,
}

impl std::fmt::Debug for RadialWaveScalar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RadialWaveScalar")
            .field("k", &self.k)
            .field("series_threshold", &self.series_threshold)
            .finish()
    }
}

impl RadialWaveScalar {
    pub fn new(profile: Arc<dyn SmoothFn>, k: usize) -> Self {
        RadialWaveScalar { profile, k, series_threshold: SERIES_THRESHOLD }
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.series_threshold = threshold;
        self
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn profile(&self) -> &dyn SmoothFn {
        self.profile.as_ref()
    }

    pub fn threshold(&self) -> f64 {
        self.series_threshold
    }

    /// Mixed derivatives ∂_t^a ∂_r^b for a + b <= jt + jr.
    pub fn ladder_apply(&self, t: f64, r: f64, jt: usize, jr: usize) -> Result<Jet2, Error> {
        let order = jt + jr;
        if order > 2 * self.k + 2 {
            return Err(Error::OrderOverflow { requested: order, available: 2 * self.k + 2 });
        }
        radial_jet(self.profile.as_ref(), self.k, t, r.abs(), order, self.series_threshold)
    }

    pub fn value(&self, t: f64, r: f64) -> f64 {
        radial_jet(self.profile.as_ref(), self.k, t, r.abs(), 0, self.series_threshold)
            .map(|j| j.value())
            .unwrap_or(f64::NAN)
    }

    /// Jet of V(t, y) = v(t, √y) in `(t, y)`, from ∂_y^m V = 2^{-m} L_{k+m}.
    pub fn ty_jet(&self, t: f64, y: f64, order: usize) -> Result<Jet2, Error> {
        ladder::ty_jet(self.profile.as_ref(), self.k, t, y, order, self.series_threshold)
    }

    /// Far-field mantissas: entry m is the t-jet of r^{k+m} ∂_y^m V at
    /// `t = r + sigma`, valid when `t + r` lies beyond the profile support.
    pub fn far_ty_mantissas(&self, sigma: f64, inv_r: f64, order: usize) -> Vec<Jet> {
        (0..=order)
            .map(|m| {
                far_field_mantissa(self.profile.as_ref(), self.k + m, sigma, inv_r, order - m)
                    .scale(0.5f64.powi(m as i32))
            })
            .collect()
    }

    /// v(x/2, x/2) through 2^k ∂_x^{k-1}[(h'(x) - T(x)) / x^k], with T the
    /// degree k-1 Taylor polynomial of h' at 0.
    pub fn diagonal_value(&self, x: f64) -> f64 {
        let k = self.k;
        let h = self.profile.as_ref();
        let at0 = h.jet(0.0, 2 * k + 40).differentiate(1);
        let scale = 2f64.powi(k as i32);
        if x.abs() < 0.05 {
            // Q^{(k-1)}(x) = Σ_{n≥2k-1} h^{(n+1)}(0)/n! · (n-k)!/(n-2k+1)! · x^{n-2k+1}
            let mut s = 0.0;
            for n in (2 * k - 1)..(2 * k + 38) {
                s += at0.taylor()[n] * factorial(n - k) / factorial(n + 1 - 2 * k)
                    * x.powi((n + 1 - 2 * k) as i32);
            }
            return scale * s;
        }
        let hp = h.jet(x, k).differentiate(1);
        let taylor: Vec<f64> = (0..k)
            .map(|n| {
                (n..k)
                    .map(|i| at0.taylor()[i] * crate::jet::binomial(i, n) * x.powi((i - n) as i32))
                    .sum()
            })
            .collect();
        let t = Jet::from_taylor(x, taylor);
        let q = &(&hp - &t) * &Jet::variable(x, k - 1).powi(-(k as i32));
        scale * q.derivative(k - 1)
    }
}
