//! Per-patch certificates: rectangle disjointness, the wedge lower bound,
//! normalized derivative sups, grid injectivity, image membership and the
//! dominance of the η' term of F.

use rayon::prelude::*;
use serde::Serialize;

use super::config::BlowupConfig;
use super::patch::{Anchor, PatchMaps, PatchPoint};
use super::scaled::ScaledReal;
use crate::freewave::corner::CornerCertificate;
use crate::jet2::Jet2;
use crate::Error;

pub const WEDGE_GRID: usize = 64;
pub const STRIP_ANCHORS: usize = 64;
pub const STRIP_OFFSETS: usize = 33;
pub const DERIV_ORDER: usize = 3;
/// Constant allowed in front of N_{i-1}^{1/2} in the η'-dominance test.
pub const DOMINANCE_CONSTANT: f64 = 1e3;

#[derive(Clone, Debug, Serialize)]
pub struct Disjointness {
    /// log10 of (lower end of R_i) / (upper end of R_{i+1}); ln of it is ln(Λ_{i+1}/2).
    pub log10_gap_below: f64,
    /// Same for R_{i-1} above R_i.
    pub log10_gap_above: f64,
    pub margin_below: ScaledReal,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Injectivity {
    pub pairs: usize,
    /// min |ΔŨ|/Λ over |Δτ| + |Δρ²| on the grid (anchor units).
    pub separation_min: f64,
    /// min |M d| / |d|₁ for M = [∂_tV ∂_yV](0,0).
    pub c_linear: f64,
    pub c_lower: Option<f64>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Membership {
    pub neighbours: Vec<usize>,
    /// Smallest distance (in units of N_{i-1}^{3/2}, log10) from a neighbour's
    /// sampled values to the bounding box of the sampled image of R_i.
    pub log10_margin: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Dominance {
    /// log10 sup|η' term| - log10 sup|η'' term|.
    pub log10_ratio: f64,
    /// log10 (N_{i-1}^{1/2} / constant).
    pub log10_required: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PatchCertificate {
    pub i: usize,
    pub delta: f64,
    pub disjointness: Disjointness,
    /// Normalized wedge N_i^{-1}∂_tU ∧ N_i^{-1}N_{i-1}^{-1}∂_yU on the grid; its
    /// forced exponent is 0.
    pub wedge_min: f64,
    pub wedge_max: f64,
    pub wedge_abs_min: f64,
    pub sign_definite: bool,
    /// Lower-scale derivative sups by order n = 1..=3, mantissas at q = (1-n)·q(Λ_i).
    pub lower_sups: Vec<f64>,
    /// Scale-i part of Ũ by order n = 0..=3, mantissas at q = -(15/4)(5/2)^{i-1}.
    pub strip_sups: Vec<f64>,
    /// F̃ by order n = 0..=3, mantissas at q = -(1/4)(5/2)^{i-1}.
    pub f_sups: Vec<f64>,
    /// log10 of the literal sup of |normalized ∂^n Ũ|, n = 1..=3.
    pub log10_u_sups: Vec<f64>,
    pub injectivity: Injectivity,
    pub membership: Membership,
    pub dominance: Dominance,
    pub pass: bool,
}

fn order_sups(jets: &[Jet2], order: usize) -> Vec<f64> {
    (0..=order)
        .map(|n| jets.iter().map(|j| j.max_derivative_of_order(n)).fold(0.0, f64::max))
        .collect()
}

/// Anchors (τ, τ²) on the light cone of scale i with τ ∈ [δ, 2δ].
pub fn strip_anchors(pm: &PatchMaps, n: usize) -> Vec<Anchor> {
    let (lo, hi) = pm.rect.tau;
    (0..n)
        .map(|j| {
            let tau = lo + (hi - lo) * j as f64 / (n - 1) as f64;
            Anchor { tau, rho2: tau * tau }
        })
        .collect()
}

/// Strip samples: every cone anchor with a-offsets covering the σ-support.
pub fn strip_points(pm: &PatchMaps, anchors: usize, offsets: usize, reach: f64) -> Vec<PatchPoint> {
    strip_anchors(pm, anchors)
        .into_iter()
        .flat_map(|an| {
            (0..offsets).map(move |m| {
                let a = -reach + 2.0 * reach * m as f64 / (offsets - 1) as f64;
                PatchPoint { anchor: an, a, b: 0.0 }
            })
        })
        .collect()
}

pub fn linear_constant(field: &crate::freewave::FreeWaveField) -> Result<f64, Error> {
    let j = field.ty_jet(0.0, 0.0, 1)?;
    let m = [[j[0].derivative(1, 0), j[0].derivative(0, 1)], [j[1].derivative(1, 0), j[1].derivative(0, 1)]];
    // |M d| / |d|₁ is minimized on the unit L¹ sphere; scan its boundary finely
    let n = 20000;
    Ok((0..n)
        .map(|k| {
            let s = -1.0 + 2.0 * k as f64 / n as f64;
            (0..2)
                .map(|sign| {
                    let d = [s, (1.0 - s.abs()) * if sign == 0 { 1.0 } else { -1.0 }];
                    (m[0][0] * d[0] + m[0][1] * d[1]).hypot(m[1][0] * d[0] + m[1][1] * d[1])
                })
                .fold(f64::INFINITY, f64::min)
        })
        .fold(f64::INFINITY, f64::min))
}

fn disjointness(cfg: &BlowupConfig, i: usize) -> Disjointness {
    let rect = |j: usize| super::patch::PatchRect::standard(cfg, j).physical_t(cfg);
    let (lo, _) = rect(i);
    let (_, hi_next) = rect(i + 1);
    let margin_below = lo.sub(&hi_next);
    let log10_gap_below = lo.log10_abs() - hi_next.log10_abs();
    let log10_gap_above = if i >= 2 {
        let (lo_prev, _) = rect(i - 1);
        let (_, hi) = rect(i);
        lo_prev.log10_abs() - hi.log10_abs()
    } else {
        f64::INFINITY
    };
    Disjointness {
        log10_gap_below,
        log10_gap_above,
        pass: margin_below.mantissa > 0.0 && log10_gap_below > 0.0 && log10_gap_above > 0.0,
        margin_below,
    }
}

struct GridSample {
    anchor: Anchor,
    value: [ScaledReal; 2],
    wedge: f64,
    lower: [Jet2; 2],
}

fn injectivity(pm: &PatchMaps, grid: &[GridSample], c_linear: f64, corner: Option<&CornerCertificate>) -> Injectivity {
    let reference = grid[0].value;
    let d: Vec<[f64; 2]> = grid
        .iter()
        .map(|g| [0, 1].map(|c| g.value[c].sub(&reference[c]).div(&pm.lambda).to_f64()))
        .collect();
    let n = grid.len();
    let separation_min = (0..n)
        .into_par_iter()
        .map(|p| {
            let mut m = f64::INFINITY;
            for q in p + 1..n {
                let dx = (grid[p].anchor.tau - grid[q].anchor.tau).abs()
                    + (grid[p].anchor.rho2 - grid[q].anchor.rho2).abs();
                let du = (d[p][0] - d[q][0]).hypot(d[p][1] - d[q][1]);
                m = m.min(du / dx);
            }
            m
        })
        .reduce(|| f64::INFINITY, f64::min);
    Injectivity {
        pairs: n * (n - 1) / 2,
        separation_min,
        c_linear,
        c_lower: corner.map(|c| c.c_lower),
        pass: separation_min.is_finite() && separation_min >= 0.5 * c_linear,
    }
}

fn membership(cfg: &BlowupConfig, pm: &PatchMaps, grid: &[GridSample]) -> Result<Membership, Error> {
    let unit = ScaledReal::power(cfg.n0, pm.dominant_scale_log);
    let scaled = |v: &[ScaledReal; 2]| [0, 1].map(|c| v[c].div(&unit).to_f64());
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for g in grid {
        let v = scaled(&g.value);
        for c in 0..2 {
            lo[c] = lo[c].min(v[c]);
            hi[c] = hi[c].max(v[c]);
        }
    }
    let neighbours: Vec<usize> = [pm.i - 1, pm.i + 1].into_iter().filter(|&j| j >= 2 && j <= cfg.i_max).collect();
    let mut margin = f64::INFINITY;
    for &j in &neighbours {
        let other = PatchMaps::new(cfg, j)?;
        for an in other.rect.grid(8) {
            let u = other.eval_u(&PatchPoint { anchor: an, a: 0.0, b: 0.0 }, 0)?;
            let v = scaled(&u.value());
            // distance to the box; saturated values count as infinitely far
            let dist = (0..2)
                .map(|c| (lo[c] - v[c]).max(v[c] - hi[c]).max(0.0))
                .fold(0.0, f64::max);
            margin = margin.min(dist);
        }
    }
    Ok(Membership { neighbours, log10_margin: margin.log10(), pass: margin > 0.0 })
}

pub fn certify_patch(cfg: &BlowupConfig, i: usize, corner: Option<&CornerCertificate>) -> Result<PatchCertificate, Error> {
    let pm = PatchMaps::new(cfg, i)?;
    let anchors = pm.rect.grid(WEDGE_GRID);
    let grid: Vec<GridSample> = anchors
        .par_iter()
        .map(|an| -> Result<GridSample, Error> {
            let u = pm.eval_u(&PatchPoint { anchor: *an, a: 0.0, b: 0.0 }, 1)?;
            Ok(GridSample {
                anchor: *an,
                value: u.value(),
                wedge: u.wedge(),
                lower: pm.lower_mantissas(an, DERIV_ORDER)?,
            })
        })
        .collect::<Result<_, _>>()?;
    let wedge_min = grid.iter().map(|g| g.wedge).fold(f64::INFINITY, f64::min);
    let wedge_max = grid.iter().map(|g| g.wedge).fold(f64::NEG_INFINITY, f64::max);
    let wedge_abs_min = grid.iter().map(|g| g.wedge.abs()).fold(f64::INFINITY, f64::min);
    let sign_definite = wedge_min > 0.0 || wedge_max < 0.0;
    let lower_jets: Vec<Jet2> = grid.iter().flat_map(|g| g.lower.clone()).collect();
    let lower_sups = order_sups(&lower_jets, DERIV_ORDER)[1..].to_vec();

    let reach = pm.support_bound() + 0.1;
    let strip = strip_points(&pm, STRIP_ANCHORS, STRIP_OFFSETS, reach);
    let per_point: Vec<(Vec<Jet2>, Vec<Jet2>, f64, f64)> = strip
        .par_iter()
        .map(|p| -> Result<_, Error> {
            let s = pm.strip_mantissas(p, DERIV_ORDER).map(|s| s.to_vec()).unwrap_or_default();
            let f = pm.eval_f(p, DERIV_ORDER)?;
            Ok((s, f.phi.to_vec(), f.first_term, f.second_term_raw))
        })
        .collect::<Result<_, _>>()?;
    let strip_jets: Vec<Jet2> = per_point.iter().flat_map(|x| x.0.clone()).collect();
    let f_jets: Vec<Jet2> = per_point.iter().flat_map(|x| x.1.clone()).collect();
    let strip_sups = order_sups(&strip_jets, DERIV_ORDER);
    let f_sups = order_sups(&f_jets, DERIV_ORDER);

    let lam_log = pm.lambda.log10_abs();
    let strip_log = pm.strip_amplitude.log10_abs();
    let log10_u_sups = (1..=DERIV_ORDER)
        .map(|n| {
            let a = lower_sups[n - 1].log10() + (1.0 - n as f64) * lam_log;
            let b = strip_sups[n].log10() + strip_log;
            a.max(b)
        })
        .collect();

    let first = per_point.iter().map(|x| x.2).fold(0.0, f64::max);
    let second = per_point.iter().map(|x| x.3).fold(0.0, f64::max);
    let log10_ratio = first.log10() - (second.log10() - lam_log);
    let n_prev = cfg.n(i - 1).log10_abs();
    let log10_required = 0.5 * n_prev - DOMINANCE_CONSTANT.log10();
    let dominance = Dominance { log10_ratio, log10_required, pass: log10_ratio >= log10_required };

    let injectivity = injectivity(&pm, &grid, linear_constant(&cfg.field)?, corner);
    let membership = membership(cfg, &pm, &grid)?;
    let disjointness = disjointness(cfg, i);
    let pass = disjointness.pass && sign_definite && injectivity.pass && membership.pass && dominance.pass;
    Ok(PatchCertificate {
        i,
        delta: cfg.delta,
        disjointness,
        wedge_min,
        wedge_max,
        wedge_abs_min,
        sign_definite,
        lower_sups,
        strip_sups,
        f_sups,
        log10_u_sups,
        injectivity,
        membership,
        dominance,
        pass,
    })
}

pub const BAND: f64 = 2.0;

/// max|x| / min|x|; infinite when a value vanishes.
pub fn band(values: &[f64]) -> f64 {
    let hi = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let lo = values.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
    if lo > 0.0 { hi / lo } else { f64::INFINITY }
}

#[derive(Clone, Debug, Serialize)]
pub struct CascadeCertificate {
    pub delta: f64,
    pub patches: Vec<PatchCertificate>,
    pub wedge_band: f64,
    /// Bands across i of the derivative mantissas, by order.
    pub lower_bands: Vec<f64>,
    pub strip_bands: Vec<f64>,
    pub f_bands: Vec<f64>,
    pub bands_pass: bool,
    pub pass: bool,
}

pub fn certify_cascade(cfg: &BlowupConfig, corner: Option<&CornerCertificate>) -> Result<CascadeCertificate, Error> {
    let patches: Vec<PatchCertificate> =
        (2..=cfg.i_max).map(|i| certify_patch(cfg, i, corner)).collect::<Result<_, _>>()?;
    let across = |get: &dyn Fn(&PatchCertificate) -> &Vec<f64>| -> Vec<f64> {
        let n = get(&patches[0]).len();
        (0..n).map(|k| band(&patches.iter().map(|p| get(p)[k]).collect::<Vec<_>>())).collect()
    };
    let wedge_band = band(&patches.iter().map(|p| p.wedge_abs_min).collect::<Vec<_>>());
    let lower_bands = across(&|p| &p.lower_sups);
    let strip_bands = across(&|p| &p.strip_sups);
    let f_bands = across(&|p| &p.f_sups);
    let bands_pass = wedge_band <= BAND && [&lower_bands, &strip_bands, &f_bands].iter().all(|b| b.iter().all(|x| *x <= BAND));
    let pass = bands_pass && patches.iter().all(|p| p.pass);
    Ok(CascadeCertificate { delta: cfg.delta, patches, wedge_band, lower_bands, strip_bands, f_bands, bands_pass, pass })
}
