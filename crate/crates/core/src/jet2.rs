//! Bivariate truncated Taylor polynomials in `(u, v)`.
//!
//! Only coefficients with `a + b <= order` are meaningful; the rest stay zero.

use std::ops::{Add, Mul, Sub};

use crate::jet::{binomial, factorial, Jet};

#[derive(Clone, Debug, PartialEq)]
pub struct Jet2 {
    order: usize,
    tc: Vec<f64>,
}

impl Jet2 {
    pub fn zero(order: usize) -> Self {
        Jet2 { order, tc: vec![0.0; (order + 1) * (order + 1)] }
    }

    pub fn constant(value: f64, order: usize) -> Self {
        let mut j = Self::zero(order);
        j.tc[0] = value;
        j
    }

    /// `c + u`, or `c + v` when `along_v` is set.
    pub fn variable(value: f64, along_v: bool, order: usize) -> Self {
        let mut j = Self::constant(value, order);
        if order >= 1 {
            if along_v {
                j.set(0, 1, 1.0);
            } else {
                j.set(1, 0, 1.0);
            }
        }
        j
    }

    /// Expands `f(c + su*u + sv*v)` given the univariate jet of `f` at `c`.
    pub fn from_uni(f: &Jet, su: f64, sv: f64, order: usize) -> Self {
        let order = order.min(f.order());
        let mut j = Self::zero(order);
        let t = f.taylor();
        for n in 0..=order {
            if t[n] == 0.0 {
                continue;
            }
            for a in 0..=n {
                let b = n - a;
                let w = binomial(n, a) * su.powi(a as i32) * sv.powi(b as i32);
                j.tc[a * (order + 1) + b] += t[n] * w;
            }
        }
        j
    }

    /// Jet in `u` only, embedded as a bivariate jet.
    pub fn from_u(f: &Jet, order: usize) -> Self {
        Self::from_uni(f, 1.0, 0.0, order)
    }

    pub fn from_v(f: &Jet, order: usize) -> Self {
        Self::from_uni(f, 0.0, 1.0, order)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, a: usize, b: usize) -> f64 {
        if a + b > self.order {
            return 0.0;
        }
        self.tc[a * (self.order + 1) + b]
    }

    pub fn set(&mut self, a: usize, b: usize, c: f64) {
        assert!(a + b <= self.order);
        self.tc[a * (self.order + 1) + b] = c;
    }

    pub fn value(&self) -> f64 {
        self.tc[0]
    }

    /// `d^a/du^a d^b/dv^b` at the expansion point.
    pub fn derivative(&self, a: usize, b: usize) -> f64 {
        self.coeff(a, b) * factorial(a) * factorial(b)
    }

    pub fn scale(&self, s: f64) -> Jet2 {
        Jet2 { order: self.order, tc: self.tc.iter().map(|c| c * s).collect() }
    }

    pub fn truncate(&self, order: usize) -> Jet2 {
        let order = order.min(self.order);
        let mut j = Jet2::zero(order);
        for a in 0..=order {
            for b in 0..=(order - a) {
                j.set(a, b, self.coeff(a, b));
            }
        }
        j
    }

    pub fn max_abs(&self) -> f64 {
        self.tc.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Largest derivative magnitude among those of total order `n`.
    pub fn max_derivative_of_order(&self, n: usize) -> f64 {
        (0..=n.min(self.order))
            .filter(|a| n - a <= self.order)
            .map(|a| self.derivative(a, n - a).abs())
            .fold(0.0, f64::max)
    }

    /// Evaluates the polynomial at the offset `(u, v)`.
    pub fn eval_offset(&self, u: f64, v: f64) -> f64 {
        let mut s = 0.0;
        for a in 0..=self.order {
            for b in 0..=(self.order - a) {
                s += self.coeff(a, b) * u.powi(a as i32) * v.powi(b as i32);
            }
        }
        s
    }

    /// Moves the expansion point by `(u, v)` exactly (polynomial shift).
    pub fn shift(&self, u: f64, v: f64) -> Jet2 {
        let n = self.order;
        let mut out = Jet2::zero(n);
        for a in 0..=n {
            for b in 0..=(n - a) {
                let c = self.coeff(a, b);
                if c == 0.0 {
                    continue;
                }
                for i in 0..=a {
                    for j in 0..=b {
                        let w = binomial(a, i)
                            * binomial(b, j)
                            * u.powi((a - i) as i32)
                            * v.powi((b - j) as i32);
                        let idx = i * (n + 1) + j;
                        out.tc[idx] += c * w;
                    }
                }
            }
        }
        out
    }

    /// ∂/∂u, one order lower.
    pub fn diff_u(&self) -> Jet2 {
        let n = self.order.saturating_sub(1);
        let mut out = Jet2::zero(n);
        for a in 0..=n {
            for b in 0..=(n - a) {
                if a + 1 + b <= self.order {
                    out.set(a, b, (a + 1) as f64 * self.coeff(a + 1, b));
                }
            }
        }
        out
    }

    /// Substitutes `u <- x(u, v)`, `v <- y(u, v)`; `x` and `y` must vanish at 0.
    pub fn compose(&self, x: &Jet2, y: &Jet2) -> Jet2 {
        let n = self.order.min(x.order).min(y.order);
        let mut xp = vec![Jet2::constant(1.0, n)];
        let mut yp = vec![Jet2::constant(1.0, n)];
        let mut xs = x.truncate(n);
        let mut ys = y.truncate(n);
        xs.tc[0] = 0.0;
        ys.tc[0] = 0.0;
        for k in 1..=n {
            xp.push(&xp[k - 1] * &xs);
            yp.push(&yp[k - 1] * &ys);
        }
        let mut out = Jet2::zero(n);
        for a in 0..=n {
            for b in 0..=(n - a) {
                let c = self.coeff(a, b);
                if c != 0.0 {
                    out = &out + &(&xp[a] * &yp[b]).scale(c);
                }
            }
        }
        out
    }
}

impl Add for &Jet2 {
    type Output = Jet2;
    fn add(self, o: &Jet2) -> Jet2 {
        let n = self.order.min(o.order);
        let mut j = Jet2::zero(n);
        for a in 0..=n {
            for b in 0..=(n - a) {
                j.set(a, b, self.coeff(a, b) + o.coeff(a, b));
            }
        }
        j
    }
}

impl Sub for &Jet2 {
    type Output = Jet2;
    fn sub(self, o: &Jet2) -> Jet2 {
        self + &o.scale(-1.0)
    }
}

impl Mul for &Jet2 {
    type Output = Jet2;
    fn mul(self, o: &Jet2) -> Jet2 {
        let n = self.order.min(o.order);
        let mut j = Jet2::zero(n);
        for a1 in 0..=n {
            for b1 in 0..=(n - a1) {
                let c1 = self.coeff(a1, b1);
                if c1 == 0.0 {
                    continue;
                }
                for a2 in 0..=(n - a1 - b1) {
                    for b2 in 0..=(n - a1 - b1 - a2) {
                        j.tc[(a1 + a2) * (n + 1) + b1 + b2] += c1 * o.coeff(a2, b2);
                    }
                }
            }
        }
        j
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_of_exponentials_along_directions() {
        // e^(u+v) * e^(u-v) = e^(2u)
        let e = Jet::variable(0.0, 5).exp();
        let p = Jet2::from_uni(&e, 1.0, 1.0, 5);
        let m = Jet2::from_uni(&e, 1.0, -1.0, 5);
        let prod = &p * &m;
        for a in 0..=5 {
            assert!((prod.derivative(a, 0) - 2f64.powi(a as i32)).abs() < 1e-12);
        }
        assert!(prod.derivative(0, 2).abs() < 1e-12);
    }

    #[test]
    fn shift_matches_evaluation() {
        let e = Jet::variable(0.0, 6).exp();
        let p = Jet2::from_uni(&e, 1.0, 2.0, 6);
        let s = p.shift(0.01, -0.02);
        assert!((s.value() - p.eval_offset(0.01, -0.02)).abs() < 1e-15);
    }

    #[test]
    fn compose_with_linear_map() {
        // f(u,v)=u*v composed with u<-u+v, v<-u-v gives u^2-v^2
        let mut f = Jet2::zero(3);
        f.set(1, 1, 1.0);
        let mut x = Jet2::zero(3);
        x.set(1, 0, 1.0);
        x.set(0, 1, 1.0);
        let mut y = Jet2::zero(3);
        y.set(1, 0, 1.0);
        y.set(0, 1, -1.0);
        let g = f.compose(&x, &y);
        assert_eq!(g.coeff(2, 0), 1.0);
        assert_eq!(g.coeff(0, 2), -1.0);
        assert_eq!(g.coeff(1, 1), 0.0);
    }
}
