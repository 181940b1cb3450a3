//! The bump h(x) = a (1 - |x|²/ρ₀²)^m_+ in R^d and the one-dimensional
//! profile whose ladder image is the free wave with data (h * h, 0).

use crate::jet::Jet;
use crate::profiles::{SmoothFn, Support};
use crate::quad;

/// Exponent of the bump.
pub const BUMP_POWER: usize = 20;

fn gamma_ratio(num: f64, den: f64) -> f64 {
    (ln_gamma(num) - ln_gamma(den)).exp()
}

/// ln Γ(x) for x > 0 (Lanczos, g = 7, n = 9), accurate to ~1e-15 relative.
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + G + 0.5;
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Radial bump in R^{2k+1}, normalized so that (h * h)(0) = ∫ h² = 1.
#[derive(Clone, Debug)]
pub struct RadialBump {
    pub k: usize,
    pub m: usize,
    pub radius: f64,
    pub amplitude: f64,
}

impl RadialBump {
    pub fn new(k: usize, radius: f64) -> Self {
        Self::with_power(k, radius, BUMP_POWER)
    }

    pub fn with_power(k: usize, radius: f64, m: usize) -> Self {
        let d = 2 * k + 1;
        let half_d = d as f64 / 2.0;
        let pi = std::f64::consts::PI;
        // ∫ (1 - |x|²/ρ₀²)^{2m}_+ dx = π^{d/2} Γ(2m+1)/Γ(2m+1+d/2) ρ₀^d
        let sq = pi.powf(half_d)
            * gamma_ratio(2.0 * m as f64 + 1.0, 2.0 * m as f64 + 1.0 + half_d)
            * radius.powi(d as i32);
        RadialBump { k, m, radius, amplitude: 1.0 / sq.sqrt() }
    }

    pub fn dimension(&self) -> usize {
        2 * self.k + 1
    }

    pub fn value(&self, r: f64) -> f64 {
        let u = 1.0 - (r / self.radius).powi(2);
        if u <= 0.0 {
            0.0
        } else {
            self.amplitude * u.powi(self.m as i32)
        }
    }

    /// Exponent M = m + k of the hyperplane projection.
    pub fn projection_power(&self) -> usize {
        self.m + self.k
    }

    /// Coefficient A with projection(s) = A (1 - s²/ρ₀²)^M_+.
    pub fn projection_coefficient(&self) -> f64 {
        let (k, m) = (self.k as f64, self.m as f64);
        let pi = std::f64::consts::PI;
        self.amplitude
            * pi.powf(k)
            * gamma_ratio(m + 1.0, m + k + 1.0)
            * self.radius.powi(2 * self.k as i32)
    }

    /// ĥ(ρ) in closed form: a ρ₀^d 2^m m! (2π)^{d/2} sqrt(2/π) κ_{k+m}(ρ₀ρ).
    pub fn fourier(&self, rho: f64) -> f64 {
        let d = self.dimension() as i32;
        let pi = std::f64::consts::PI;
        self.amplitude
            * self.radius.powi(d)
            * 2f64.powi(self.m as i32)
            * crate::jet::factorial(self.m)
            * (2.0 * pi).powf(d as f64 / 2.0)
            * (2.0 / pi).sqrt()
            * crate::special::kappa(self.k + self.m, self.radius * rho)
    }

    /// ĥ(ρ) by quadrature against the radial kernel
    /// (2π)^{d/2} J_{d/2-1}(rρ)/(rρ)^{d/2-1} r^{d-1}.
    pub fn fourier_quadrature(&self, rho: f64) -> f64 {
        let d = self.dimension() as i32;
        let pi = std::f64::consts::PI;
        let kernel = (2.0 * pi).powf(d as f64 / 2.0) * (2.0 / pi).sqrt();
        let panels = 4 + (self.radius * rho / 4.0).ceil() as usize;
        quad::composite(
            |r| self.value(r) * kernel * crate::special::kappa(self.k - 1, r * rho) * r.powi(d - 1),
            0.0,
            self.radius,
            panels,
            48,
        )
    }
}

/// The even one-dimensional profile G with L_k[G](t, r) the radial free wave
/// with data (h * h, 0): G = (-1)^k (2π)^{-k} / 2 · (P * P), P the projection
/// of h onto a line.
#[derive(Clone, Debug)]
pub struct ConvolvedProfile {
    bump: RadialBump,
    prefactor: f64,
}

impl ConvolvedProfile {
    pub fn new(bump: RadialBump) -> Self {
        let k = bump.k;
        let a = bump.projection_coefficient();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let prefactor = sign * (2.0 * std::f64::consts::PI).powi(-(k as i32)) / 2.0 * a * a;
        ConvolvedProfile { bump, prefactor }
    }

    pub fn bump(&self) -> &RadialBump {
        &self.bump
    }

    /// Jet of (1 - x²/ρ₀²)^M at x (zero outside |x| < ρ₀).
    fn power_jet(&self, x: f64, order: usize) -> Jet {
        let rr = self.bump.radius;
        if x.abs() >= rr {
            return Jet::zero(x, order);
        }
        let mut tc = vec![0.0; order + 1];
        tc[0] = 1.0 - (x / rr).powi(2);
        if order >= 1 {
            tc[1] = -2.0 * x / (rr * rr);
        }
        if order >= 2 {
            tc[2] = -1.0 / (rr * rr);
        }
        Jet::from_taylor(x, tc).powi(self.bump.projection_power() as i32)
    }
}

impl SmoothFn for ConvolvedProfile {
    fn jet(&self, s: f64, order: usize) -> Jet {
        let rr = self.bump.radius;
        if s.abs() >= 2.0 * rr {
            return Jet::zero(s, order);
        }
        let lo = (-rr).max(s - rr);
        let hi = rr.min(s + rr);
        let nodes = self.bump.projection_power() * 2 + 2;
        let mut acc = Jet::zero(s, order);
        for (u, w) in quad::mapped(lo, hi, nodes) {
            let left = (1.0 - (u / rr).powi(2)).powi(self.bump.projection_power() as i32);
            let right = self.power_jet(s - u, order);
            acc = &acc + &right.scale(w * left * self.prefactor);
        }
        Jet::from_taylor(s, acc.taylor().to_vec())
    }

    fn support(&self) -> Support {
        let e = 2.0 * self.bump.radius;
        Support::Interval(-e, e)
    }

    fn smoothness(&self) -> &'static str {
        "piecewise polynomial, C^{2M} at the junctions"
    }

    fn junctions(&self) -> Vec<f64> {
        let e = 2.0 * self.bump.radius;
        vec![-e, 0.0, e]
    }

    fn piece_degree(&self) -> Option<usize> {
        Some(4 * self.bump.projection_power() + 1)
    }

    fn max_order(&self) -> usize {
        self.bump.projection_power()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freewave::ladder;

    fn sphere_area(d: usize) -> f64 {
        let pi = std::f64::consts::PI;
        2.0 * pi.powf(d as f64 / 2.0) / ln_gamma(d as f64 / 2.0).exp()
    }

    #[test]
    fn ln_gamma_known_values() {
        assert!((ln_gamma(5.0) - 24f64.ln()).abs() < 1e-13);
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-13);
        assert!((ln_gamma(41.0) - (1..=40).map(|i| (i as f64).ln()).sum::<f64>()).abs() < 1e-11);
    }

    #[test]
    fn square_norm_is_one() {
        let b = RadialBump::new(5, 0.02);
        let s = quad::composite(|r| b.value(r).powi(2) * r.powi(10), 0.0, b.radius, 8, 48);
        assert!((s * sphere_area(11) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn projection_matches_hyperplane_integral() {
        let b = RadialBump::new(5, 0.02);
        let s = 0.3 * b.radius;
        let rho = (b.radius * b.radius - s * s).sqrt();
        let area = sphere_area(10);
        let direct = quad::composite(|q| b.value((s * s + q * q).sqrt()) * q.powi(9), 0.0, rho, 8, 48);
        let closed = b.projection_coefficient()
            * (1.0 - (s / b.radius).powi(2)).powi(b.projection_power() as i32);
        assert!((direct * area - closed).abs() < 1e-12 * closed.abs());
    }

    #[test]
    fn fourier_closed_form_matches_quadrature() {
        let b = RadialBump::new(5, 0.02);
        for rho in [0.0, 10.0, 400.0, 3000.0] {
            let c = b.fourier(rho);
            let q = b.fourier_quadrature(rho);
            assert!((c - q).abs() < 1e-10 * b.fourier(0.0), "rho={rho}: {c} vs {q}");
        }
    }

    #[test]
    fn wave_starts_from_autocorrelation() {
        let b = RadialBump::new(5, 0.02);
        let g = ConvolvedProfile::new(b);
        let j = ladder::ty_jet(&g, 5, 0.0, 0.0, 1, 0.25).unwrap();
        assert!((j.value() - 1.0).abs() < 1e-10, "{}", j.value());
        assert!(j.derivative(1, 0).abs() < 1e-8);
    }
}
