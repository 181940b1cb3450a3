//! The operator L_κ[h](t, r) = (r^{-1}∂_r)^κ (h(t+r) + h(t-r)).
//!
//! For κ = (d-1)/2 this is a radial free wave in odd dimension d. Three
//! evaluation routes: the closed ladder sum (large r), the even power series
//! in r (small r, analytic windows only), and an exact integral
//! representation (small r near junctions of h).

use crate::jet::{factorial, Jet};
use crate::jet2::Jet2;
use crate::profiles::{SmoothFn, Support};
use crate::quad;
use crate::Error;

/// Coefficients (κ+i-1)! / (2^i (κ-i-1)! i!) of the ladder sum, i < κ.
pub fn ladder_coefficients(kappa: usize) -> Vec<f64> {
    (0..kappa)
        .map(|i| {
            factorial(kappa + i - 1)
                / (2f64.powi(i as i32) * factorial(kappa - i - 1) * factorial(i))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Zero,
    Ladder,
    Series,
    Integral,
}

/// Picks the evaluation route the way [`radial_jet`] does.
pub fn choose_branch(h: &dyn SmoothFn, t: f64, r: f64, threshold: f64) -> Branch {
    if h.support().misses(t - r, t + r) {
        return Branch::Zero;
    }
    if r >= threshold {
        return Branch::Ladder;
    }
    let (lo, hi) = (t - 3.0 * r - 1e-3, t + 3.0 * r + 1e-3);
    if r <= 0.1 && h.junctions().iter().all(|&x| x < lo || x > hi) {
        Branch::Series
    } else {
        Branch::Integral
    }
}

/// Mixed `(t, r)` jet of L_κ[h] up to total order `order`.
pub fn radial_jet(
    h: &dyn SmoothFn,
    kappa: usize,
    t: f64,
    r: f64,
    order: usize,
    threshold: f64,
) -> Result<Jet2, Error> {
    assert!(r >= 0.0, "radius must be non-negative");
    match choose_branch(h, t, r, threshold) {
        Branch::Zero => Ok(Jet2::zero(order)),
        Branch::Ladder => {
            check_order(h, kappa + order)?;
            Ok(ladder_sum(h, kappa, t, r, order))
        }
        Branch::Series => {
            if let Some(j) = series(h, kappa, t, r, order) {
                return Ok(j);
            }
            check_order(h, 2 * kappa + order)?;
            Ok(integral(h, kappa, t, r, order))
        }
        Branch::Integral => {
            check_order(h, 2 * kappa + order)?;
            Ok(integral(h, kappa, t, r, order))
        }
    }
}

fn check_order(h: &dyn SmoothFn, needed: usize) -> Result<(), Error> {
    if needed > h.max_order() {
        return Err(Error::OrderOverflow { requested: needed, available: h.max_order() });
    }
    Ok(())
}

/// Σ_i c_i [(-1)^i h^{(κ-i)}(t+r) + (-1)^κ h^{(κ-i)}(t-r)] r^{-(κ+i)}.
pub fn ladder_sum(h: &dyn SmoothFn, kappa: usize, t: f64, r: f64, order: usize) -> Jet2 {
    let coef = ladder_coefficients(kappa);
    let sup = h.support();
    let plus = (!sup.misses(t + r, t + r)).then(|| h.derivative_jet(t + r, kappa + order - 1));
    let minus = (!sup.misses(t - r, t - r)).then(|| h.derivative_jet(t - r, kappa + order - 1));
    let rv = Jet::variable(r, order);
    let mut acc = Jet2::zero(order);
    for (i, c) in coef.iter().enumerate() {
        let rp = Jet2::from_v(&rv.powi(-((kappa + i) as i32)), order);
        let mut s = Jet2::zero(order);
        if let Some(p) = &plus {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            s = &s + &Jet2::from_uni(&p.differentiate(kappa - i - 1), 1.0, 1.0, order).scale(sign);
        }
        if let Some(m) = &minus {
            let sign = if kappa % 2 == 0 { 1.0 } else { -1.0 };
            s = &s + &Jet2::from_uni(&m.differentiate(kappa - i - 1), 1.0, -1.0, order).scale(sign);
        }
        acc = &acc + &(&s * &rp).scale(*c);
    }
    acc
}

const SERIES_TERMS: usize = 48;

/// Σ_{n≥κ} 2 h^{(2n)}(t) [2^κ n! / ((n-κ)! (2n)!)] r^{2n-2κ}; `None` when the
/// terms have not died out within the budget.
pub fn series(h: &dyn SmoothFn, kappa: usize, t: f64, r: f64, order: usize) -> Option<Jet2> {
    let top = 2 * (kappa + SERIES_TERMS) + order;
    if top > h.max_order() {
        return None;
    }
    let hj = h.derivative_jet(t, top - 1);
    if !hj.is_finite() {
        return None;
    }
    let rv = Jet::variable(r, order);
    let mut acc = Jet2::zero(order);
    let mut quiet = 0;
    for n in kappa..kappa + SERIES_TERMS {
        let c = 2.0 * 2f64.powi(kappa as i32) * factorial(n) / (factorial(n - kappa) * factorial(2 * n));
        let a = Jet2::from_u(&hj.differentiate(2 * n - 1).truncate(order), order);
        let rp = Jet2::from_v(&rv.powi((2 * n - 2 * kappa) as i32), order);
        let term = (&a * &rp).scale(c);
        acc = &acc + &term;
        let small = term.max_abs() <= 1e-16 * acc.max_abs().max(1e-300);
        if 2 * (n - kappa) > order + 1 && small {
            quiet += 1;
            if quiet >= 2 {
                return acc.max_abs().is_finite().then_some(acc);
            }
        } else {
            quiet = 0;
        }
    }
    None
}

/// 2^{1-κ}/(κ-1)! ∫_{-1}^{1} h^{(2κ)}(t+rs) (1-s²)^{κ-1} ds, differentiated
/// under the integral sign.
pub fn integral(h: &dyn SmoothFn, kappa: usize, t: f64, r: f64, order: usize) -> Jet2 {
    let pref = 2f64.powi(1 - kappa as i32) / factorial(kappa - 1);
    let len = (order + 1) * (order + 1);
    let integrand = |s: f64| -> Vec<f64> {
        let hj = h.derivative_jet(t + r * s, 2 * kappa + order - 1).differentiate(2 * kappa - 1);
        let w = (1.0 - s * s).powi(kappa as i32 - 1) * pref;
        let j = Jet2::from_uni(&hj, 1.0, s, order).scale(w);
        let mut v = Vec::with_capacity(len);
        for a in 0..=order {
            for b in 0..=order {
                v.push(j.coeff(a, b));
            }
        }
        v
    };
    let total = integrate_window(h, t, r, &integrand, len);
    let mut j = Jet2::zero(order);
    for a in 0..=order {
        for b in 0..=(order - a) {
            j.set(a, b, total[a * (order + 1) + b]);
        }
    }
    j
}

/// Break points in s ∈ [-1, 1] of the window t + r s: junctions and support
/// ends of h.
fn window_cuts(h: &dyn SmoothFn, t: f64, r: f64) -> Vec<f64> {
    let mut cuts = vec![-1.0, 1.0];
    if r > 0.0 {
        let mut pts = h.junctions();
        if let Support::Interval(a, b) = h.support() {
            pts.push(a);
            pts.push(b);
        }
        for x in pts {
            let s = (x - t) / r;
            if s > -1.0 && s < 1.0 {
                cuts.push(s);
            }
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    cuts
}

/// Integrates a vector-valued integrand over s ∈ [-1, 1], piece by piece.
/// Piecewise polynomial profiles get an exact fixed rule; others are adaptive.
fn integrate_window<F: Fn(f64) -> Vec<f64>>(
    h: &dyn SmoothFn,
    t: f64,
    r: f64,
    integrand: &F,
    len: usize,
) -> Vec<f64> {
    let mut total = vec![0.0; len];
    for w in window_cuts(h, t, r).windows(2) {
        let mid = t + r * 0.5 * (w[0] + w[1]);
        if r > 0.0 && !h.support().contains(mid) {
            continue;
        }
        let part = match h.piece_degree() {
            Some(deg) => {
                let n = deg / 2 + 2;
                let mut acc = vec![0.0; len];
                for (s, wt) in quad::mapped(w[0], w[1], n) {
                    for (a, v) in acc.iter_mut().zip(integrand(s)) {
                        *a += wt * v;
                    }
                }
                acc
            }
            None => quad::adaptive_vec(integrand, w[0], w[1], 16, len, 1e-12),
        };
        for (a, p) in total.iter_mut().zip(part) {
            *a += p;
        }
    }
    total
}

/// Jet of V(t, y) = L_k[h](t, √y) in `(t, y)` up to total order `order`,
/// using ∂_y^m V = 2^{-m} L_{k+m}[h]. Profile jets are shared across m.
pub fn ty_jet(
    h: &dyn SmoothFn,
    k: usize,
    t: f64,
    y: f64,
    order: usize,
    threshold: f64,
) -> Result<Jet2, Error> {
    let r = y.max(0.0).sqrt();
    let mut out = Jet2::zero(order);
    let put = |out: &mut Jet2, m: usize, slice: &[f64]| {
        let scale = 0.5f64.powi(m as i32) / factorial(m);
        for (a, d) in slice.iter().enumerate() {
            out.set(a, m, d * scale / factorial(a));
        }
    };
    match choose_branch(h, t, r, threshold) {
        Branch::Zero => Ok(out),
        Branch::Ladder => {
            check_order(h, k + 2 * order)?;
            let sup = h.support();
            let plus = (!sup.misses(t + r, t + r)).then(|| h.derivative_jet(t + r, k + 2 * order - 1));
            let minus = (!sup.misses(t - r, t - r)).then(|| h.derivative_jet(t - r, k + 2 * order - 1));
            for m in 0..=order {
                let kappa = k + m;
                let coef = ladder_coefficients(kappa);
                let mut slice = vec![0.0; order - m + 1];
                for (a, v) in slice.iter_mut().enumerate() {
                    for (i, c) in coef.iter().enumerate() {
                        let mut s = 0.0;
                        if let Some(p) = &plus {
                            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                            s += sign * p.derivative(kappa - i + a - 1);
                        }
                        if let Some(q) = &minus {
                            let sign = if kappa % 2 == 0 { 1.0 } else { -1.0 };
                            s += sign * q.derivative(kappa - i + a - 1);
                        }
                        *v += c * s * r.powi(-((kappa + i) as i32));
                    }
                }
                put(&mut out, m, &slice);
            }
            Ok(out)
        }
        branch => {
            if branch == Branch::Series {
                let mut ok = true;
                for m in 0..=order {
                    match series(h, k + m, t, r, order - m) {
                        Some(j) => {
                            let slice: Vec<f64> = (0..=order - m).map(|a| j.derivative(a, 0)).collect();
                            put(&mut out, m, &slice);
                        }
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok {
                    return Ok(out);
                }
            }
            check_order(h, 2 * k + 2 * order)?;
            let offsets: Vec<usize> = (0..=order)
                .scan(0, |acc, m| {
                    let o = *acc;
                    *acc += order - m + 1;
                    Some(o)
                })
                .collect();
            let len = offsets[order] + 1;
            let integrand = |s: f64| -> Vec<f64> {
                let hj = h.derivative_jet(t + r * s, 2 * k + 2 * order - 1);
                let mut v = vec![0.0; len];
                for m in 0..=order {
                    let kappa = k + m;
                    let w = 2f64.powi(1 - kappa as i32) / factorial(kappa - 1)
                        * (1.0 - s * s).powi(kappa as i32 - 1);
                    for a in 0..=order - m {
                        v[offsets[m] + a] = w * hj.derivative(2 * kappa + a - 1);
                    }
                }
                v
            };
            let total = integrate_window(h, t, r, &integrand, len);
            for m in 0..=order {
                put(&mut out, m, &total[offsets[m]..offsets[m] + order - m + 1]);
            }
            Ok(out)
        }
    }
}

/// Far-field form: for t + r beyond the support, L_κ[h](t, r) equals
/// r^{-κ} times the returned jet in σ = t - r, built from (1/r)^i corrections.
/// The jet is in the t-direction at fixed r.
pub fn far_field_mantissa(h: &dyn SmoothFn, kappa: usize, sigma: f64, inv_r: f64, order: usize) -> Jet {
    let coef = ladder_coefficients(kappa);
    let hj = h.derivative_jet(sigma, kappa + order - 1);
    let sign = if kappa % 2 == 0 { 1.0 } else { -1.0 };
    let mut acc = Jet::zero(sigma, order);
    for (i, c) in coef.iter().enumerate() {
        let w = sign * c * inv_r.powi(i as i32);
        if w == 0.0 {
            continue;
        }
        acc = &acc + &hj.differentiate(kappa - i - 1).truncate(order).scale(w);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficients_for_five() {
        assert_eq!(ladder_coefficients(5), vec![1.0, 10.0, 45.0, 105.0, 105.0]);
    }
}
