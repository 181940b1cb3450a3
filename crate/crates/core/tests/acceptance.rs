//! One line per acceptance criterion with its runtime. Tolerances and run
//! sizes are pinned here. Criterion 5 is known red at δ = 1/64: the wedge
//! changes sign on R_{i,3} (see README); it is reported, then rerun at the
//! certified δ.

mod common;

use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use blowup_lab::blowup::certify::{certify_cascade, CascadeCertificate};
use blowup_lab::blowup::nonlinearity::{nonlinearity_cascade, NonlinearityReport};
use blowup_lab::blowup::residual::amplitude;
use blowup_lab::blowup::{BlowupConfig, CERTIFIED_DELTA, DEFAULT_DELTA};
use blowup_lab::exponents::{self, regularity_ledger, Variant};
use blowup_lab::freewave::certify::{
    decay_fit, diagonal_check, epsilon_scan, huygens_leakage, origin_check, quadrant_check, residual_check,
};
use blowup_lab::freewave::corner::{corner_certificate, CornerCertificate};
use blowup_lab::freewave::FreeWaveField;

const KNOWN_RED: &[usize] = &[5];
const SEED: u64 = 7;
const NONLINEARITY_GRID: usize = 24;

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(n: usize, limit: f64, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let secs = start.elapsed().as_secs_f64();
    let pass = out.pass && secs < limit;
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {n}: {verdict} ({secs:.2} s, limit {limit} s) {}", out.detail);
    pass
}

fn cascade_summary(c: &CascadeCertificate) -> String {
    let disjoint = c.patches.iter().all(|p| p.disjointness.pass);
    let wmin = c.patches.iter().map(|p| p.wedge_min).fold(f64::INFINITY, f64::min);
    let wmax = c.patches.iter().map(|p| p.wedge_max).fold(f64::NEG_INFINITY, f64::max);
    let sep = c.patches.iter().map(|p| p.injectivity.separation_min).fold(f64::INFINITY, f64::min);
    let c_lin = c.patches[0].injectivity.c_linear;
    let bands = c.lower_bands.iter().chain(&c.strip_bands).chain(&c.f_bands).copied().fold(0.0, f64::max);
    format!(
        "δ={}: disjoint={disjoint} wedge∈[{wmin:.3e},{wmax:.3e}] wedge_band={:.4} deriv_band_max={bands:.4} \
         separation={sep:.3e} (need ≥ {:.1}) pass={}",
        c.delta,
        c.wedge_band,
        c_lin / 2.0,
        c.pass
    )
}

fn nonlinearity_summary(r: &NonlinearityReport) -> String {
    let band = r.bands.iter().copied().fold(0.0, f64::max);
    let finite = r.patches.iter().all(|p| p.sups.iter().all(|s| s.is_finite()));
    format!(
        "δ={}: finite={finite} band_max={band:.4} slope={:.4} (expect -0.25±30%) round_trip={:.2e} pass={}",
        r.delta, r.slope, r.round_trip_max, r.pass
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let field = Arc::new(FreeWaveField::standard().expect("standard field"));
    println!("setup: free wave built in {:.2} s", start.elapsed().as_secs_f64());
    let mut failed = Vec::new();
    let mut record = |n: usize, ok: bool| {
        if !ok {
            failed.push(n);
        }
    };

    record(
        1,
        report(1, 10.0, || {
            let (value, deriv) = common::ladder_oracle_error(20, 1, 1.0);
            Outcome {
                pass: value <= 1e-12,
                detail: format!("k=1..5, 20 profiles, r∈[1,2]: value err {value:.2e} (tol 1e-12), first derivatives {deriv:.2e}"),
            }
        }),
    );

    record(
        2,
        report(2, 60.0, || {
            let r = residual_check(&field, 200, SEED);
            let fourth = (3.5..=4.5).contains(&r.median_order);
            Outcome {
                pass: r.pass && r.max_richardson <= 1e-5 && fourth,
                detail: format!(
                    "200 points: max Richardson residual {:.2e} (tol 1e-5), median observed order {:.2} over {} points",
                    r.max_richardson, r.median_order, r.orders_measured
                ),
            }
        }),
    );

    record(
        3,
        report(3, 120.0, || {
            let diag = diagonal_check(&field, 500, 20.0);
            let cone = epsilon_scan(&field, 50.0, 400);
            let prof = field.profile.certificates();
            Outcome {
                pass: diag.pass && diag.min_value > 0.0 && cone.pass && cone.epsilon_max > 0.0 && prof.signs_negative,
                detail: format!(
                    "diagonal min {:.3e} on 500 pts; cone ε_max {:.4} up to T=50; signs (∂tv1, ∂ttv1, ∂rrv1)(0,0) = ({:.3e}, {:.3e}, {:.3e})",
                    diag.min_value, cone.epsilon_max, prof.dt_v1_at_origin, prof.dtt_v1_at_origin, prof.drr_v1_at_origin
                ),
            }
        }),
    );

    let mut corner: Option<CornerCertificate> = None;
    record(
        4,
        report(4, 300.0, || {
            let q = quadrant_check(&field, 10_000, 50.0, SEED + 1).expect("quadrant");
            let o = origin_check(&field).expect("origin");
            let c = corner_certificate(&field, 48, 3000, SEED + 2).expect("corner");
            let d = decay_fit(&field, 10.0, 100.0, 24).expect("decay");
            let l = huygens_leakage(&field, 400, SEED + 3).expect("leakage");
            let leak = l.max_outside / l.peak;
            let pass = q.violations == 0
                && o.pass
                && o.dt[0] < 0.0
                && o.dt_second_relative <= 1e-10
                && c.pass
                && 0.0 < c.c_lower
                && c.c_lower <= c.c_upper
                && (d.slope + 5.0).abs() <= 0.5
                && leak <= 1e-10;
            let detail = format!(
                "quadrant violations {}/10000; ∂tV(0,0)=({:.3e}, {:.1e}) rel {:.1e}; corner c={:.3} C={:.3}; decay slope {:.3}; leakage {:.1e} of peak",
                q.violations, o.dt[0], o.dt[1], o.dt_second_relative, c.c_lower, c.c_upper, d.slope, leak
            );
            corner = Some(c);
            Outcome { pass, detail }
        }),
    );
    let corner = corner.expect("criterion 4 ran");

    let mut pinned = BlowupConfig::with_defaults(field.clone(), DEFAULT_DELTA).expect("config");
    pinned.check_corner(corner.nbhd_radius);
    let mut certified = BlowupConfig::with_defaults(field.clone(), CERTIFIED_DELTA).expect("config");
    certified.check_corner(corner.nbhd_radius);

    record(
        5,
        report(5, 600.0, || {
            let red = certify_cascade(&pinned, Some(&corner)).expect("cascade");
            let green = certify_cascade(&certified, Some(&corner)).expect("cascade");
            Outcome {
                pass: red.pass,
                detail: format!("[{}] [{}]", cascade_summary(&red), cascade_summary(&green)),
            }
        }),
    );

    record(
        6,
        report(6, 600.0, || {
            let main = nonlinearity_cascade(&certified, NONLINEARITY_GRID).expect("nonlinearity");
            let pinned = nonlinearity_cascade(&pinned, NONLINEARITY_GRID).expect("nonlinearity");
            let slope_ok = (main.slope + 0.25).abs() <= 0.3 * 0.25;
            let band_ok = main.bands.iter().all(|b| *b <= 2.0);
            Outcome {
                pass: main.pass && slope_ok && band_ok && main.round_trip_max <= 1e-8,
                detail: format!("[{}] [{}]", nonlinearity_summary(&main), nonlinearity_summary(&pinned)),
            }
        }),
    );

    record(
        7,
        report(7, 60.0, || {
            let mut pass = true;
            let mut parts = Vec::new();
            for cfg in [&pinned, &certified] {
                let a = amplitude(cfg, 4).expect("amplitude");
                let ok = a.rows.iter().all(|r| r.ratio >= 0.5 * a.v00 && r.ratio <= 2.0 * a.v00 && r.dominant_scale == r.j);
                pass &= ok && a.growing;
                let ratios: Vec<String> = a.rows.iter().map(|r| format!("{:.2}", r.ratio)).collect();
                let logs: Vec<String> = a.rows.iter().map(|r| format!("{:.1}", r.log10_u)).collect();
                parts.push(format!("δ={}: ratios [{}] log10|U| [{}]", cfg.delta, ratios.join(", "), logs.join(", ")));
            }
            let v00 = field.value(0.0, 0.0).expect("origin");
            Outcome { pass, detail: format!("|v(0,0)|={:.4}; {}", v00[0].hypot(v00[1]), parts.join("; ")) }
        }),
    );

    record(
        8,
        report(8, 1.0, || {
            let rows: Vec<_> = (2..=30).map(|d| exponents::ansatz_feasibility(d).expect("d >= 2")).collect();
            let flips = rows.iter().all(|r| r.feasible == (r.d >= 11));
            let l = &rows[9];
            let exact = l.d == 11
                && l.alpha == num_rational::Rational64::new(3, 2)
                && l.step_exponent == num_rational::Rational64::new(5, 2)
                && l.discriminant == num_rational::Rational64::new(1, 4);
            Outcome {
                pass: flips && exact,
                detail: format!(
                    "feasible ⇔ d ≥ 11 on 2..30: {flips}; d=11: α={} step={} disc={}",
                    l.alpha, l.step_exponent, l.discriminant
                ),
            }
        }),
    );

    record(
        9,
        report(9, 5.0, || {
            let ledger = regularity_ledger(1e-3).expect("ledger");
            let dir = tempfile::tempdir().expect("tempdir");
            let (p9, p10) = (dir.path().join("fig9d.csv"), dir.path().join("fig10d.csv"));
            exponents::write_csv(std::fs::File::create(&p9).expect("csv"), &ledger.d9).expect("csv");
            exponents::write_csv(std::fs::File::create(&p10).expect("csv"), &ledger.d10_printed).expect("csv");
            let failures = |p: &std::path::Path| -> Vec<f64> {
                csv::Reader::from_path(p)
                    .expect("csv")
                    .records()
                    .map(|r| r.expect("row"))
                    .filter(|r| &r[3] == "false")
                    .map(|r| r[0].parse().expect("s"))
                    .collect()
            };
            let f9 = failures(&p9);
            let f10 = failures(&p10);
            let csv_ok = f9.is_empty() && f10.iter().any(|s| *s <= 2.0) && f10.iter().any(|s| *s >= 3.0);
            let meets = [2.0, 4.0].iter().all(|&p| {
                let c = exponents::c_of_p(9, p, Variant::Printed).expect("p >= 2");
                (c - if p == 2.0 { 1.0 } else { -0.75 }).abs() < 1e-15
            });
            let o = &ledger.base.offsets;
            Outcome {
                pass: ledger.pass && csv_ok && meets,
                detail: format!(
                    "d=9 failures {} of {}; d=10 printed gaps {:?}, corrected gaps {:?}; offsets ({}, {}, {}, {}); interpolation exact={}",
                    f9.len(),
                    ledger.d9.rows.len(),
                    ledger.d10_printed.gap_intervals,
                    ledger.d10_corrected.gap_intervals,
                    o.energy,
                    o.l2l4,
                    o.linf_linf,
                    o.l1l2,
                    ledger.base.exact_match
                ),
            }
        }),
    );

    let unexpected: Vec<usize> = failed.iter().copied().filter(|n| !KNOWN_RED.contains(n)).collect();
    println!(
        "summary: {} of 9 pass; red {:?} (known red {:?}); total {:.1} s",
        9 - failed.len(),
        failed,
        KNOWN_RED,
        start.elapsed().as_secs_f64()
    );
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
