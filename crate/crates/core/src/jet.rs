//! Truncated Taylor arithmetic.
//!
//! A [`Jet`] holds the Taylor coefficients of a scalar function at a point,
//! up to a fixed order. Derivatives are recovered by multiplying with `n!`.
//! All operations truncate to the smaller order of their operands.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    center: f64,
    tc: Vec<f64>,
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for j in 0..k {
        acc = acc * (n - j) as f64 / (j + 1) as f64;
    }
    acc
}

impl Jet {
    pub fn zero(center: f64, order: usize) -> Self {
        Jet { center, tc: vec![0.0; order + 1] }
    }

    pub fn constant(center: f64, value: f64, order: usize) -> Self {
        let mut j = Self::zero(center, order);
        j.tc[0] = value;
        j
    }

    /// The identity function `x` expanded at `center`.
    pub fn variable(center: f64, order: usize) -> Self {
        let mut j = Self::constant(center, center, order);
        if order >= 1 {
            j.tc[1] = 1.0;
        }
        j
    }

    pub fn from_taylor(center: f64, tc: Vec<f64>) -> Self {
        assert!(!tc.is_empty(), "a jet needs at least one coefficient");
        Jet { center, tc }
    }

    pub fn from_derivatives(center: f64, d: &[f64]) -> Self {
        let tc = d.iter().enumerate().map(|(n, v)| v / factorial(n)).collect();
        Self::from_taylor(center, tc)
    }

    pub fn order(&self) -> usize {
        self.tc.len() - 1
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn value(&self) -> f64 {
        self.tc[0]
    }

    pub fn taylor(&self) -> &[f64] {
        &self.tc
    }

    pub fn derivative(&self, n: usize) -> f64 {
        self.tc.get(n).map_or(0.0, |c| c * factorial(n))
    }

    pub fn derivatives(&self) -> Vec<f64> {
        (0..=self.order()).map(|n| self.derivative(n)).collect()
    }

    pub fn truncate(mut self, order: usize) -> Self {
        self.tc.truncate(order + 1);
        self
    }

    pub fn max_abs(&self) -> f64 {
        self.tc.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.tc.iter().all(|c| c.is_finite())
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet { center: self.center, tc: self.tc.iter().map(|c| c * s).collect() }
    }

    /// Jet of the `m`-th derivative, `m` orders shorter.
    pub fn differentiate(&self, m: usize) -> Jet {
        assert!(m <= self.order(), "cannot differentiate past the jet order");
        let tc = (m..=self.order())
            .map(|n| self.tc[n] * factorial(n) / factorial(n - m))
            .collect();
        Jet { center: self.center, tc }
    }

    /// Evaluates the Taylor polynomial at `center + h`.
    pub fn eval_offset(&self, h: f64) -> f64 {
        self.tc.iter().rev().fold(0.0, |acc, c| acc * h + c)
    }

    fn pair(&self, other: &Jet) -> usize {
        self.order().min(other.order())
    }

    pub fn recip(&self) -> Jet {
        let a = &self.tc;
        let inv = 1.0 / a[0];
        let mut b = vec![0.0; a.len()];
        b[0] = inv;
        for n in 1..a.len() {
            let s: f64 = (1..=n).map(|j| a[j] * b[n - j]).sum();
            b[n] = -inv * s;
        }
        Jet { center: self.center, tc: b }
    }

    pub fn exp(&self) -> Jet {
        let a = &self.tc;
        let mut e = vec![0.0; a.len()];
        e[0] = a[0].exp();
        for n in 1..a.len() {
            let s: f64 = (1..=n).map(|j| j as f64 * a[j] * e[n - j]).sum();
            e[n] = s / n as f64;
        }
        Jet { center: self.center, tc: e }
    }

    /// `self^p` for a positive leading value.
    pub fn powf(&self, p: f64) -> Jet {
        let a = &self.tc;
        assert!(a[0] > 0.0, "powf needs a positive base, got {}", a[0]);
        let mut b = vec![0.0; a.len()];
        b[0] = a[0].powf(p);
        for n in 1..a.len() {
            let s: f64 = (1..=n)
                .map(|j| (p * j as f64 - (n - j) as f64) * a[j] * b[n - j])
                .sum();
            b[n] = s / (n as f64 * a[0]);
        }
        Jet { center: self.center, tc: b }
    }

    pub fn powi(&self, n: i32) -> Jet {
        if n < 0 {
            return self.recip().powi(-n);
        }
        let mut result = Jet::constant(self.center, 1.0, self.order());
        let mut base = self.clone();
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Computes `outer(self)`, where `outer` is expanded at `self.value()`.
    pub fn compose(&self, outer: &Jet) -> Jet {
        let order = self.order().min(outer.order());
        let mut u = self.clone().truncate(order);
        u.tc[0] = 0.0;
        let mut acc = Jet::constant(self.center, outer.tc[order], order);
        for n in (0..order).rev() {
            acc = &acc * &u;
            acc.tc[0] += outer.tc[n];
        }
        acc
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, o: &Jet) -> Jet {
        let n = self.pair(o);
        Jet { center: self.center, tc: (0..=n).map(|i| self.tc[i] + o.tc[i]).collect() }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, o: &Jet) -> Jet {
        let n = self.pair(o);
        Jet { center: self.center, tc: (0..=n).map(|i| self.tc[i] - o.tc[i]).collect() }
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, o: &Jet) -> Jet {
        let n = self.pair(o);
        let mut tc = vec![0.0; n + 1];
        for i in 0..=n {
            if self.tc[i] == 0.0 {
                continue;
            }
            for j in 0..=(n - i) {
                tc[i + j] += self.tc[i] * o.tc[j];
            }
        }
        Jet { center: self.center, tc }
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Add<f64> for &Jet {
    type Output = Jet;
    fn add(self, c: f64) -> Jet {
        let mut j = self.clone();
        j.tc[0] += c;
        j
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, c: f64) -> Jet {
        self.scale(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_of_variable_matches_closed_form() {
        let x = Jet::variable(0.3, 8);
        let e = x.exp();
        for n in 0..=8 {
            assert!((e.derivative(n) - 0.3f64.exp()).abs() < 1e-13);
        }
    }

    #[test]
    fn recip_and_powf_agree() {
        let x = &Jet::variable(1.7, 10) * 2.0;
        let a = x.recip().powi(3);
        let b = x.powf(-3.0);
        for n in 0..=10 {
            let scale = a.derivative(n).abs().max(1.0);
            assert!((a.derivative(n) - b.derivative(n)).abs() < 1e-12 * scale);
        }
    }

    #[test]
    fn compose_sin_free_check() {
        // exp(exp(x)) at 0: derivatives are Bell numbers times e.
        let x = Jet::variable(0.0, 6);
        let inner = x.exp();
        let outer = Jet::variable(inner.value(), 6).exp();
        let c = inner.compose(&outer);
        let bell = [1.0, 1.0, 2.0, 5.0, 15.0, 52.0, 203.0];
        for (n, b) in bell.iter().enumerate() {
            assert!((c.derivative(n) / std::f64::consts::E - b).abs() < 1e-10);
        }
    }

    #[test]
    fn differentiate_shifts() {
        let x = Jet::variable(2.0, 5);
        let p = x.powi(5);
        let d2 = p.differentiate(2);
        assert!((d2.value() - 20.0 * 8.0).abs() < 1e-12);
        assert_eq!(d2.order(), 3);
    }
}
