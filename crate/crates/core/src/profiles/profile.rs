use std::sync::Arc;

use serde::Serialize;

use super::{bump_jet, Blend, BlendConfig, Cutoff, SmoothFn, Support};
use crate::jet::{factorial, Jet};
use crate::quad;
use crate::Error;

const NODE_STEP: f64 = 1.0 / 128.0;
const LOWEST: f64 = -2.0;

/// The remainder R with R^{(k-1)} = (k-1)! ψ^{-k}, fixed by R = (-1)^{k-1}/x
/// wherever ψ is the identity. Lower derivatives are tabulated on a node
/// grid and completed by a short Cauchy repeated integral.
#[derive(Debug)]
pub struct Remainder {
    k: usize,
    blend: Blend,
    anchor: f64,
    nodes: Vec<f64>,
    table: Vec<Vec<f64>>,
}

impl Remainder {
    pub fn new(k: usize, blend: Blend) -> Self {
        let anchor = blend.identity_from();
        let low = k - 1;
        let mut nodes = vec![anchor];
        let mut table = vec![(0..low).map(|j| closed_form(k, j, anchor)).collect::<Vec<_>>()];
        let mut rem = Remainder { k, blend, anchor, nodes: Vec::new(), table: Vec::new() };
        while *nodes.last().unwrap() > LOWEST - NODE_STEP {
            let x0 = *nodes.last().unwrap();
            let x1 = x0 - NODE_STEP;
            let next = rem.propagate(x0, table.last().unwrap(), x1, 20);
            nodes.push(x1);
            table.push(next);
        }
        rem.nodes = nodes;
        rem.table = table;
        rem
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn blend(&self) -> &Blend {
        &self.blend
    }

    /// R^{(k-1)}(x) = (k-1)! ψ(x)^{-k}.
    pub fn top(&self, x: f64) -> f64 {
        factorial(self.k - 1) * self.blend.value(x).powi(-(self.k as i32))
    }

    /// Derivatives R^{(j)}(x1), j < k-1, from their values at x0.
    fn propagate(&self, x0: f64, at_x0: &[f64], x1: f64, n: usize) -> Vec<f64> {
        let low = self.k - 1;
        let pts: Vec<(f64, f64)> = if x1 == x0 {
            Vec::new()
        } else {
            quad::mapped(x0, x1, n).into_iter().map(|(s, w)| (s, w * self.top(s))).collect()
        };
        let h = x1 - x0;
        (0..low)
            .map(|j| {
                let taylor: f64 = (0..low - j)
                    .map(|i| at_x0[j + i] * h.powi(i as i32) / factorial(i))
                    .sum();
                let m = low - 1 - j;
                let integral: f64 = pts
                    .iter()
                    .map(|(s, w)| w * (x1 - s).powi(m as i32))
                    .sum::<f64>()
                    / factorial(m);
                taylor + integral
            })
            .collect()
    }

    /// R^{(j)}(x) for j < k-1.
    pub fn lower_derivatives(&self, x: f64) -> Vec<f64> {
        if x >= self.anchor {
            return (0..self.k - 1).map(|j| closed_form(self.k, j, x)).collect();
        }
        let m = (((self.anchor - x) / NODE_STEP).round() as usize).min(self.nodes.len() - 1);
        self.propagate(self.nodes[m], &self.table[m], x, 16)
    }
}

fn closed_form(k: usize, j: usize, x: f64) -> f64 {
    let sign = if (k - 1 + j) % 2 == 0 { 1.0 } else { -1.0 };
    sign * factorial(j) / x.powi(j as i32 + 1)
}

impl SmoothFn for Remainder {
    fn jet(&self, x: f64, order: usize) -> Jet {
        let low = self.k - 1;
        if x >= self.anchor {
            let sign = if low % 2 == 0 { 1.0 } else { -1.0 };
            return Jet::variable(x, order).recip().scale(sign);
        }
        let mut tc: Vec<f64> = self
            .lower_derivatives(x)
            .into_iter()
            .enumerate()
            .map(|(j, d)| d / factorial(j))
            .collect();
        if order >= low {
            let psi = self.blend.jet(x, order - low);
            let top = psi.powi(-(self.k as i32)).scale(factorial(low));
            for (n, c) in top.taylor().iter().enumerate() {
                tc.push(c * factorial(n) / factorial(low + n));
            }
        }
        tc.truncate(order + 1);
        Jet::from_taylor(x, tc)
    }

    fn support(&self) -> Support {
        Support::All
    }

    fn smoothness(&self) -> &'static str {
        "C-infinity"
    }

    fn junctions(&self) -> Vec<f64> {
        self.blend.junctions()
    }
}

#[derive(Debug)]
struct ProfileData {
    k: usize,
    rem: Remainder,
    eta: Cutoff,
    bump_coeff: f64,
    g_table: Vec<f64>,
}

impl ProfileData {
    fn end(&self) -> f64 {
        self.rem.anchor
    }

    fn core_value(&self, x: f64) -> f64 {
        let k = self.k as i32;
        let sign = if self.k % 2 == 0 { 1.0 } else { -1.0 };
        let r = self.rem.lower_derivatives(x);
        let r0 = if self.k == 1 { self.rem.top(x) } else { r[0] };
        let mut v = sign * x.powi(k - 1) + x.powi(k) * r0;
        if x < -1.0 {
            v *= self.eta.value(x);
        }
        v
    }

    fn gprime_value(&self, x: f64) -> f64 {
        if x >= self.end() || x <= LOWEST {
            return 0.0;
        }
        let mut v = self.core_value(x);
        if x < -1.0 {
            v += self.bump_coeff * bump_jet(x + 2.0, 0).value();
        }
        v
    }

    fn gprime_jet(&self, x: f64, order: usize) -> Jet {
        if x >= self.end() || x <= LOWEST {
            return Jet::zero(x, order);
        }
        let k = self.k as i32;
        let sign = if self.k % 2 == 0 { 1.0 } else { -1.0 };
        let xv = Jet::variable(x, order);
        let p = xv.powi(k - 1).scale(sign);
        let r = self.rem.jet(x, order);
        let mut core = &p + &(&xv.powi(k) * &r);
        if x < -1.0 {
            core = &core * &self.eta.jet(x, order);
            let b = bump_jet(x + 2.0, order).scale(self.bump_coeff);
            core = &core + &Jet::from_taylor(x, b.taylor().to_vec());
        }
        core
    }

    fn panel_integral(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        quad::integrate(f, a, b, 20)
    }

    fn g_value(&self, x: f64) -> f64 {
        if x >= self.end() || x <= LOWEST {
            return 0.0;
        }
        let m = (((self.end() - x) / NODE_STEP).round() as usize).min(self.g_table.len() - 1);
        let x0 = self.rem.nodes[m];
        self.g_table[m] + self.panel_integral(x0, x, |s| self.gprime_value(s))
    }
}

/// The scalar profile g and its derivative, supported in `[-2, ψ-identity point]`.
#[derive(Clone, Debug)]
pub struct Profile {
    data: Arc<ProfileData>,
}

#[derive(Clone, Debug)]
pub struct ProfileFn {
    data: Arc<ProfileData>,
    derivative: bool,
}

pub fn make_profile(k: usize) -> Result<Profile, Error> {
    Profile::new(k, BlendConfig::default())
}

impl Profile {
    pub fn new(k: usize, cfg: BlendConfig) -> Result<Self, Error> {
        let blend = Blend::new(k, cfg)?;
        let rem = Remainder::new(k, blend);
        let mut data = ProfileData { k, rem, eta: Cutoff::new(), bump_coeff: 0.0, g_table: Vec::new() };
        let nodes = data.rem.nodes.clone();
        let sweep = |d: &ProfileData| {
            let mut table = vec![0.0];
            for w in nodes.windows(2) {
                let step = d.panel_integral(w[0], w[1], |s| d.gprime_value(s));
                table.push(table.last().unwrap() + step);
            }
            table
        };
        let unbalanced = sweep(&data);
        let total = *unbalanced.last().unwrap();
        data.bump_coeff = total / Cutoff::bump_mass();
        data.g_table = sweep(&data);
        let residual = data.g_table.last().unwrap().abs();
        if !residual.is_finite() || residual > 1e-10 * total.abs().max(1.0) {
            return Err(Error::Quadrature(format!("g(-2) = {residual:e} after balancing")));
        }
        Ok(Profile { data: Arc::new(data) })
    }

    pub fn k(&self) -> usize {
        self.data.k
    }

    /// Left end of the support, as a positive number `a` with supp g ⊂ [-a, 1].
    pub fn support_radius(&self) -> f64 {
        -LOWEST
    }

    pub fn g(&self) -> ProfileFn {
        ProfileFn { data: self.data.clone(), derivative: false }
    }

    pub fn gprime(&self) -> ProfileFn {
        ProfileFn { data: self.data.clone(), derivative: true }
    }

    pub fn remainder(&self) -> &Remainder {
        &self.data.rem
    }

    pub fn taylor_at_zero(&self) -> Jet {
        self.g().jet(0.0, 2 * self.k() + 2)
    }

    pub fn certificates(&self) -> ProfileCertificate {
        let k = self.k();
        let rem = self.remainder();
        let top_min = (0..=400)
            .map(|i| rem.top(4.0 * i as f64 / 400.0))
            .fold(f64::INFINITY, f64::min);
        let rj = rem.jet(0.0, k + 1);
        let r_k = rj.derivative(k);
        let r_k1 = rj.derivative(k + 1);
        let p2 = 2f64.powi(k as i32 + 1);
        let kf = k as f64;
        let gk = self.g().jet(0.0, k).derivative(k);
        let gk_expected = if k % 2 == 0 { 1.0 } else { -1.0 } * factorial(k - 1);
        let dt = p2 * r_k;
        let dtt = p2 * (2.0 * kf + 1.0) / (kf + 1.0) * r_k1;
        let drr = p2 / (kf + 1.0) * r_k1;
        let signs_negative = dt < 0.0 && dtt < 0.0 && drr < 0.0;
        let gk_ok = ((gk - gk_expected) / gk_expected).abs() <= 1e-10;
        ProfileCertificate {
            k,
            top_min_on_grid: top_min,
            top_positive: top_min > 0.0,
            r_k_at_zero: r_k,
            r_k_plus_one_at_zero: r_k1,
            dt_v1_at_origin: dt,
            dtt_v1_at_origin: dtt,
            drr_v1_at_origin: drr,
            g_k_at_zero: gk,
            g_k_expected: gk_expected,
            signs_negative,
            pass: top_min > 0.0 && signs_negative && gk_ok,
        }
    }
}

impl SmoothFn for ProfileFn {
    fn jet(&self, x: f64, order: usize) -> Jet {
        let d = &self.data;
        if self.derivative {
            return d.gprime_jet(x, order);
        }
        if x >= d.end() || x <= LOWEST {
            return Jet::zero(x, order);
        }
        let mut tc = vec![d.g_value(x)];
        if order >= 1 {
            let gp = d.gprime_jet(x, order - 1);
            for (n, c) in gp.taylor().iter().enumerate() {
                tc.push(c / (n + 1) as f64);
            }
        }
        Jet::from_taylor(x, tc)
    }

    fn derivative_jet(&self, x: f64, order: usize) -> Jet {
        if self.derivative {
            self.data.gprime_jet(x, order + 1).differentiate(1)
        } else {
            self.data.gprime_jet(x, order)
        }
    }

    fn support(&self) -> Support {
        Support::Interval(LOWEST, self.data.end())
    }

    fn smoothness(&self) -> &'static str {
        "C-infinity, compactly supported"
    }

    fn junctions(&self) -> Vec<f64> {
        let mut j = vec![-2.0, -1.0];
        j.extend(self.data.rem.blend.junctions());
        j
    }

    fn value(&self, x: f64) -> f64 {
        if self.derivative {
            self.data.gprime_value(x)
        } else {
            self.data.g_value(x)
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProfileCertificate {
    pub k: usize,
    pub top_min_on_grid: f64,
    pub top_positive: bool,
    pub r_k_at_zero: f64,
    pub r_k_plus_one_at_zero: f64,
    pub dt_v1_at_origin: f64,
    pub dtt_v1_at_origin: f64,
    pub drr_v1_at_origin: f64,
    pub g_k_at_zero: f64,
    pub g_k_expected: f64,
    pub signs_negative: bool,
    pub pass: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile() -> Profile {
        make_profile(5).unwrap()
    }

    // R by one long repeated integral from the anchor, no node table.
    fn r_direct(rem: &Remainder, x: f64) -> f64 {
        let b = rem.anchor;
        let low = rem.k - 1;
        let taylor: f64 = (0..low)
            .map(|i| closed_form(rem.k, i, b) * (x - b).powi(i as i32) / factorial(i))
            .sum();
        let integral = quad::composite(
            |s| (x - s).powi(low as i32 - 1) * rem.top(s),
            b,
            x,
            400,
            20,
        ) / factorial(low - 1);
        taylor + integral
    }

    #[test]
    fn remainder_table_agrees_with_direct_integral() {
        let p = profile();
        for x in [-1.9, -0.7, 0.0, 0.15, 0.5, 0.85] {
            let a = p.remainder().jet(x, 0).value();
            let b = r_direct(p.remainder(), x);
            assert!((a - b).abs() < 1e-11 * b.abs().max(1.0), "x={x}: {a} vs {b}");
        }
    }

    #[test]
    fn gprime_vanishes_past_identity_point() {
        let p = profile();
        for i in 0..50 {
            let x = 1.0 + 9.0 * i as f64 / 49.0;
            assert_eq!(p.gprime().value(x), 0.0);
        }
        // just below the anchor the cancellation is exact up to rounding
        assert!(p.gprime().value(0.9 - 1e-9).abs() < 1e-12);
    }

    #[test]
    fn g_k_at_zero_is_signed_factorial() {
        let c = profile().certificates();
        assert!(((c.g_k_at_zero + 24.0) / 24.0).abs() < 1e-10);
        assert!(c.pass);
    }

    #[test]
    fn g_jets_are_consistent_under_taylor_propagation() {
        let g = profile().g();
        for x in [-1.5, -0.3, 0.1, 0.4, 0.7] {
            let j = g.jet(x, 4);
            let mut prev = f64::INFINITY;
            for h in [1e-2, 5e-3, 2.5e-3] {
                let err = (j.eval_offset(h) - g.value(x + h)).abs();
                assert!(err < prev, "x={x}");
                prev = err;
            }
            assert!(prev < 1e-9, "x={x}: {prev}");
        }
    }

    #[test]
    fn g_vanishes_at_left_end() {
        let g = profile().g();
        assert!(g.value(-2.0 + 1e-9).abs() < 1e-10);
        assert!(g.value(-1.999).abs() < 1e-9);
    }
}
