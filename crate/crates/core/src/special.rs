//! Spherical Bessel functions in the normalized form κ_n(z) = j_n(z) / z^n,
//! which is entire and even in z with κ_n(0) = 1/(2n+1)!!.

/// (2n+1)!! as a float.
pub fn double_factorial_odd(n: usize) -> f64 {
    (0..=n).fold(1.0, |acc, j| acc * (2 * j + 1) as f64)
}

/// Power series of κ_n, used for small arguments.
pub fn kappa_series(n: usize, z: f64) -> f64 {
    let x = -0.5 * z * z;
    let mut term = 1.0 / double_factorial_odd(n);
    let mut sum = term;
    for m in 1..200 {
        term *= x / (m as f64 * (2 * (n + m) + 1) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// j_0(z), ..., j_{nmax}(z) for z > 0.
pub fn spherical_bessel_all(nmax: usize, z: f64) -> Vec<f64> {
    assert!(z > 0.0);
    let j0 = z.sin() / z;
    let j1 = z.sin() / (z * z) - z.cos() / z;
    let mut out = vec![0.0; nmax + 1];
    if z >= nmax as f64 {
        out[0] = j0;
        if nmax >= 1 {
            out[1] = j1;
        }
        for l in 1..nmax {
            out[l + 1] = (2 * l + 1) as f64 / z * out[l] - out[l - 1];
        }
        return out;
    }
    // Miller's downward recurrence, normalized against j0 or j1
    let start = nmax + 20 + z as usize;
    let (mut above, mut cur) = (0.0f64, 1e-280f64);
    let mut raw = vec![0.0; nmax + 1];
    let mut raw1 = 0.0;
    for l in (1..=start).rev() {
        let below = (2 * l + 1) as f64 / z * cur - above;
        above = cur;
        cur = below;
        let idx = l - 1;
        if idx <= nmax {
            raw[idx] = cur;
        }
        if idx == 1 {
            raw1 = cur;
        }
        if cur.abs() > 1e250 {
            above *= 1e-250;
            cur *= 1e-250;
            for v in raw.iter_mut() {
                *v *= 1e-250;
            }
            raw1 *= 1e-250;
        }
    }
    let scale = if j0.abs() >= j1.abs() { j0 / raw[0] } else { j1 / raw1 };
    for (o, r) in out.iter_mut().zip(&raw) {
        *o = r * scale;
    }
    out
}

/// κ_n(z) = j_n(z) / z^n.
pub fn kappa(n: usize, z: f64) -> f64 {
    let z = z.abs();
    if z < 1.0 {
        return kappa_series(n, z);
    }
    spherical_bessel_all(n, z)[n] / z.powi(n as i32)
}

/// κ_{n0}, ..., κ_{n0+count-1} at one argument.
pub fn kappa_range(n0: usize, count: usize, z: f64) -> Vec<f64> {
    let z = z.abs();
    if z < 1.0 {
        return (n0..n0 + count).map(|n| kappa_series(n, z)).collect();
    }
    let all = spherical_bessel_all(n0 + count - 1, z);
    (n0..n0 + count).map(|n| all[n] / z.powi(n as i32)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j4_closed_form_against_series() {
        let z: f64 = 1.0;
        let (s, c) = (z.sin(), z.cos());
        let j4 = (105.0 / z.powi(5) - 45.0 / z.powi(3) + 1.0 / z) * s
            - (105.0 / z.powi(4) - 10.0 / z.powi(2)) * c;
        assert!((kappa_series(4, z) - j4).abs() < 1e-10 * j4.abs());
        assert!((spherical_bessel_all(4, z)[4] - j4).abs() < 1e-13);
    }

    #[test]
    fn miller_and_upward_agree_at_the_switch() {
        let n = 25;
        // nmax = 30 > z forces the downward branch at the same argument
        let miller = spherical_bessel_all(30, 25.0)[n];
        let upward = spherical_bessel_all(n, 25.0)[n];
        assert!((miller - upward).abs() < 1e-10 * upward.abs(), "{miller} {upward}");
        let v = spherical_bessel_all(n, 10.0)[n];
        let s = kappa_series(n, 10.0) * 10f64.powi(n as i32);
        assert!((v - s).abs() < 1e-9 * s.abs());
    }

    #[test]
    fn derivative_identity() {
        // κ_n'(z) = -z κ_{n+1}(z)
        for z in [0.3, 2.0, 7.5] {
            let h = 1e-5;
            let fd = (kappa(3, z + h) - kappa(3, z - h)) / (2.0 * h);
            assert!((fd + z * kappa(4, z)).abs() < 1e-8);
        }
    }
}
