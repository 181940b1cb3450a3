//! Exponent bookkeeping: the blowup-ansatz numerology and the regularity
//! iteration c(2s) > 1 - s for d = 9, 10.

mod figure;

use std::fmt;
use std::str::FromStr;

use num_rational::{BigRational, Rational64};
use num_traits::{Signed, ToPrimitive};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::Error;
pub use figure::{write_csv, write_svg};

fn rat(a: i64, b: i64) -> Rational64 {
    Rational64::new(a, b)
}

fn rat_str<S: Serializer>(q: &Rational64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentLedger {
    pub d: i64,
    #[serde(serialize_with = "rat_str")]
    pub alpha: Rational64,
    #[serde(serialize_with = "rat_str")]
    pub discriminant: Rational64,
    pub feasible: bool,
    /// N_j ≈ N_{j-1}^{α+1}.
    #[serde(serialize_with = "rat_str")]
    pub step_exponent: Rational64,
    /// (d-3)/2·(α+1) - (d-1)/2 - 1 - α(α+1) at α = (d-5)/4.
    #[serde(serialize_with = "rat_str")]
    pub slack: Rational64,
}

/// The ansatz needs (α - (d-5)/4)² ≤ (d² - 10d - 7)/16 for some α.
pub fn ansatz_feasibility(d: i64) -> Result<ExponentLedger, Error> {
    if d < 2 {
        return Err(Error::UnsupportedDimension(d));
    }
    let alpha = rat(d - 5, 4);
    let discriminant = rat(d * d - 10 * d - 7, 16);
    let one = rat(1, 1);
    let slack = rat(d - 3, 2) * (alpha + one) - rat(d - 1, 2) - one - alpha * (alpha + one);
    Ok(ExponentLedger { d, alpha, discriminant, feasible: !discriminant.is_negative(), step_exponent: alpha + one, slack })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// First d = 10 branch read as printed, 8/(2p) - 3.
    #[default]
    Printed,
    /// First branch 8/p - 3, following (d-2)/p - (d-4)/2.
    Corrected,
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "printed" => Ok(Variant::Printed),
            "corrected" | "pattern-corrected" => Ok(Variant::Corrected),
            _ => Err(Error::Config(format!("unknown variant {s:?} (printed|corrected)"))),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Printed => "printed",
            Variant::Corrected => "corrected",
        })
    }
}

/// c(p) = min(a₁/p - b₁, a₂/p - b₂); the branches as exact (slope, intercept) in 1/p.
pub fn branches(d: i64, variant: Variant) -> Result<[(Rational64, Rational64); 2], Error> {
    match (d, variant) {
        (9, _) => Ok([(rat(7, 1), rat(-5, 2)), (rat(11, 1), rat(-7, 2))]),
        (10, Variant::Printed) => Ok([(rat(4, 1), rat(-3, 1)), (rat(12, 1), rat(-4, 1))]),
        (10, Variant::Corrected) => Ok([(rat(8, 1), rat(-3, 1)), (rat(12, 1), rat(-4, 1))]),
        _ => Err(Error::UnsupportedDimension(d)),
    }
}

pub fn c_of_p(d: i64, p: f64, variant: Variant) -> Result<f64, Error> {
    if !(p >= 2.0) {
        return Err(Error::Config(format!("p = {p} below 2")));
    }
    let b = branches(d, variant)?;
    let x = 1.0 / p;
    Ok(b.iter().map(|(a, c)| a.to_f64().unwrap() * x + c.to_f64().unwrap()).fold(f64::INFINITY, f64::min))
}

#[derive(Clone, Debug, Serialize)]
pub struct CurveRow {
    pub s: f64,
    pub c2s: f64,
    pub one_minus_s: f64,
    pub feasible: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegularityCurve {
    pub d: i64,
    pub variant: Variant,
    pub rows: Vec<CurveRow>,
    /// Maximal failure intervals, ends refined to width 1e-9 (or clamped to the scan range).
    pub gap_intervals: Vec<(f64, f64)>,
}

pub const GAP_WIDTH: f64 = 1e-9;

/// Sign of c(2s) - (1 - s) decided in exact arithmetic; s and the branch
/// coefficients are dyadic, so the float-to-rational conversion is exact.
fn feasible(d: i64, variant: Variant, s: f64) -> bool {
    let big = |x: f64| BigRational::from_float(x).expect("finite");
    let s = big(s);
    let one = big(1.0);
    let two_s = &s + &s;
    // 2s · (a/(2s) + c - 1 + s) = a + 2s(c - 1 + s)
    branches(d, variant)
        .expect("validated before the scan")
        .iter()
        .all(|(a, c)| big(a.to_f64().unwrap()) + &two_s * (big(c.to_f64().unwrap()) - &one + &s) > big(0.0))
}

/// Boundary between a feasible and an infeasible node, by bisection.
fn refine(d: i64, variant: Variant, mut lo: f64, mut hi: f64) -> f64 {
    let lo_ok = feasible(d, variant, lo);
    while hi - lo > GAP_WIDTH {
        let mid = 0.5 * (lo + hi);
        if feasible(d, variant, mid) == lo_ok {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // report the end lying inside the failure set
    if lo_ok {
        hi
    } else {
        lo
    }
}

pub fn regularity_scan(d: i64, s_lo: f64, s_hi: f64, step: f64, variant: Variant) -> Result<RegularityCurve, Error> {
    if !(1.0 <= s_lo && s_lo < s_hi && step > 0.0) {
        return Err(Error::Config(format!("bad scan range [{s_lo}, {s_hi}] step {step}")));
    }
    branches(d, variant)?;
    let n = ((s_hi - s_lo) / step).round() as usize;
    let rows: Vec<CurveRow> = (0..=n)
        .map(|j| {
            let s = if j == n { s_hi } else { s_lo + j as f64 * step };
            let c2s = c_of_p(d, 2.0 * s, variant).expect("validated");
            CurveRow { s, c2s, one_minus_s: 1.0 - s, feasible: feasible(d, variant, s) }
        })
        .collect();
    let mut gap_intervals = Vec::new();
    let mut start = None;
    for j in 0..rows.len() {
        let bad = !rows[j].feasible;
        match (start, bad) {
            (None, true) => {
                start = Some(if j == 0 { s_lo } else { refine(d, variant, rows[j - 1].s, rows[j].s) });
            }
            (Some(a), false) => {
                gap_intervals.push((a, refine(d, variant, rows[j - 1].s, rows[j].s)));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(a) = start {
        gap_intervals.push((a, s_hi));
    }
    Ok(RegularityCurve { d, variant, rows, gap_intervals })
}

/// Offsets e in ‖P_N u‖ ≲ N^{-s+e} for the four d = 9 estimates.
#[derive(Clone, Debug, PartialEq)]
pub struct BaseExponents {
    pub energy: Rational64,
    pub l2l4: Rational64,
    pub linf_linf: Rational64,
    pub l1l2: Rational64,
}

impl Serialize for BaseExponents {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("BaseExponents", 4)?;
        st.serialize_field("energy", &self.energy.to_string())?;
        st.serialize_field("l2l4", &self.l2l4.to_string())?;
        st.serialize_field("linf_linf", &self.linf_linf.to_string())?;
        st.serialize_field("l1l2", &self.l1l2.to_string())?;
        st.end()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BaseExponentTable {
    pub offsets: BaseExponents,
    /// Lines through (1/p, -e) at 1/p = 0, 1/4, 1/2, as (slope, intercept).
    pub lines: [(String, String); 2],
    /// The lines coincide exactly with the two branches of c(p).
    pub exact_match: bool,
    /// max |c(p) - min(lines)| over p in [2, 1000].
    pub sampled_gap: f64,
    pub pass: bool,
}

fn line(x0: Rational64, y0: Rational64, x1: Rational64, y1: Rational64) -> (Rational64, Rational64) {
    let slope = (y1 - y0) / (x1 - x0);
    (slope, y0 - slope * x0)
}

/// The endpoint offsets sit at 1/p = 0 (L∞L∞), 1/4 (L²L⁴) and 1/2 (energy
/// and its dual L¹L²); c is minus the interpolated offset.
pub fn base_exponent_table(d: i64) -> Result<BaseExponentTable, Error> {
    if d != 9 {
        return Err(Error::UnsupportedDimension(d));
    }
    let offsets = BaseExponents { energy: rat(-1, 1), l2l4: rat(3, 4), linf_linf: rat(7, 2), l1l2: rat(-1, 1) };
    let half_ok = offsets.energy == offsets.l1l2;
    let steep = line(rat(0, 1), -offsets.linf_linf, rat(1, 4), -offsets.l2l4);
    let shallow = line(rat(1, 4), -offsets.l2l4, rat(1, 2), -offsets.energy);
    let b = branches(9, Variant::Printed)?;
    let exact_match = half_ok && b.contains(&steep) && b.contains(&shallow);
    let sampled_gap = (0..=1000)
        .map(|j| {
            let p = 2.0 + 998.0 * j as f64 / 1000.0;
            let x = 1.0 / p;
            let f = |l: (Rational64, Rational64)| l.0.to_f64().unwrap() * x + l.1.to_f64().unwrap();
            (c_of_p(9, p, Variant::Printed).unwrap() - f(steep).min(f(shallow))).abs()
        })
        .fold(0.0, f64::max);
    let show = |l: (Rational64, Rational64)| (l.0.to_string(), l.1.to_string());
    Ok(BaseExponentTable {
        offsets,
        lines: [show(steep), show(shallow)],
        exact_match,
        sampled_gap,
        pass: exact_match && sampled_gap < 1e-12,
    })
}

/// Largest second difference of c over `nodes` equally spaced values of 1/p in (0, 1/2].
pub fn max_second_difference(d: i64, variant: Variant, nodes: usize) -> Result<f64, Error> {
    let c: Vec<f64> = (1..=nodes)
        .map(|j| c_of_p(d, nodes as f64 / (0.5 * j as f64), variant))
        .collect::<Result<_, _>>()?;
    Ok(c.windows(3).map(|w| w[0] - 2.0 * w[1] + w[2]).fold(f64::NEG_INFINITY, f64::max))
}

#[derive(Clone, Debug, Serialize)]
pub struct RegularityLedger {
    pub d9: RegularityCurve,
    pub d10_printed: RegularityCurve,
    pub d10_corrected: RegularityCurve,
    pub base: BaseExponentTable,
    pub max_second_difference: f64,
    pub pass: bool,
}

impl RegularityLedger {
    pub fn curve(&self, d: i64, variant: Variant) -> &RegularityCurve {
        match (d, variant) {
            (9, _) => &self.d9,
            (_, Variant::Printed) => &self.d10_printed,
            (_, Variant::Corrected) => &self.d10_corrected,
        }
    }
}

fn covers(gaps: &[(f64, f64)], lo: f64, hi: f64) -> bool {
    gaps.iter().any(|&(a, b)| a <= lo && hi <= b)
}

/// d = 9 on [1, 7/2] and both d = 10 variants on [1, 4], step 1e-3.
pub fn regularity_ledger(step: f64) -> Result<RegularityLedger, Error> {
    let d9 = regularity_scan(9, 1.0, 3.5, step, Variant::Printed)?;
    let d10_printed = regularity_scan(10, 1.0, 4.0, step, Variant::Printed)?;
    let d10_corrected = regularity_scan(10, 1.0, 4.0, step, Variant::Corrected)?;
    let base = base_exponent_table(9)?;
    let max_second_difference = [(9, Variant::Printed), (10, Variant::Printed), (10, Variant::Corrected)]
        .iter()
        .map(|&(d, v)| max_second_difference(d, v, 1000))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let pass = d9.gap_intervals.is_empty()
        && d9.rows.iter().all(|r| r.feasible)
        && covers(&d10_printed.gap_intervals, 2.0, 3.0)
        && covers(&d10_corrected.gap_intervals, 2.0, 3.0)
        && base.pass
        && max_second_difference <= 1e-12;
    Ok(RegularityLedger { d9, d10_printed, d10_corrected, base, max_second_difference, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eleven_is_first_feasible() {
        let l = ansatz_feasibility(11).unwrap();
        assert_eq!((l.alpha, l.step_exponent, l.discriminant), (rat(3, 2), rat(5, 2), rat(1, 4)));
        assert_eq!(l.slack, l.discriminant);
        assert!(!ansatz_feasibility(10).unwrap().feasible);
        assert_eq!(ansatz_feasibility(10).unwrap().discriminant, rat(-7, 16));
    }

    #[test]
    fn corrected_gap_is_two_to_three() {
        let c = regularity_scan(10, 1.0, 4.0, 1e-3, Variant::Corrected).unwrap();
        assert_eq!(c.gap_intervals.len(), 1);
        let (a, b) = c.gap_intervals[0];
        assert!((a - 2.0).abs() < 2e-9 && (b - 3.0).abs() < 2e-9, "{a} {b}");
    }
}
