//! Run configuration, pipeline orchestration and the JSON report behind the
//! `verify` binary.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::blowup::nonlinearity::{nonlinearity_cascade, write_f_table};
use crate::blowup::residual::residual_and_amplitude;
use crate::blowup::{certify::certify_cascade, BlowupConfig, DEFAULT_DELTA, DEFAULT_I_MAX, DEFAULT_N0};
use crate::exponents::{self, Variant};
use crate::freewave::certify::{certify_freewave, FreeWaveOptions};
use crate::freewave::corner::corner_certificate;
use crate::freewave::FreeWaveField;
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Freewave,
    Blowup,
    Numerology,
    Regularity,
    All,
}

/// Dimension selector: one value or an inclusive range `lo..hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DimRange {
    pub lo: i64,
    pub hi: i64,
}

impl DimRange {
    pub fn single(d: i64) -> Self {
        DimRange { lo: d, hi: d }
    }

    pub fn parse(s: &str) -> Result<Self, Error> {
        let bad = || Error::Malformed(format!("dimension {s:?} is neither N nor N..M"));
        let r = match s.split_once("..") {
            Some((a, b)) => {
                let b = b.strip_prefix('=').unwrap_or(b);
                DimRange { lo: a.trim().parse().map_err(|_| bad())?, hi: b.trim().parse().map_err(|_| bad())? }
            }
            None => DimRange::single(s.trim().parse().map_err(|_| bad())?),
        };
        if r.lo < 2 || r.lo > r.hi {
            return Err(Error::Config(format!("dimension range {}..{} must satisfy 2 <= lo <= hi", r.lo, r.hi)));
        }
        Ok(r)
    }
}

impl Serialize for DimRange {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.lo == self.hi {
            s.serialize_i64(self.lo)
        } else {
            s.serialize_str(&format!("{}..{}", self.lo, self.hi))
        }
    }
}

/// A real given as a decimal or as a fraction `a/b`.
pub fn parse_real(s: &str) -> Result<f64, Error> {
    let bad = || Error::Malformed(format!("{s:?} is not a number"));
    match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| bad())?;
            let b: f64 = b.trim().parse().map_err(|_| bad())?;
            Ok(a / b)
        }
        None => s.trim().parse().map_err(|_| bad()),
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum RealOrText {
    Real(f64),
    Text(String),
}

impl RealOrText {
    fn value(&self) -> Result<f64, Error> {
        match self {
            RealOrText::Real(x) => Ok(*x),
            RealOrText::Text(s) => parse_real(s),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum DimOrText {
    Dim(i64),
    Text(String),
}

/// Keys accepted in the JSON config file; command-line flags override them.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    delta: Option<RealOrText>,
    n0: Option<RealOrText>,
    i_max: Option<usize>,
    d: Option<DimOrText>,
    variant: Option<String>,
    out: Option<PathBuf>,
    threads: Option<usize>,
    nonlinearity_grid: Option<usize>,
    residual_samples: Option<usize>,
    amplitude_scales: Option<usize>,
    scan_step: Option<f64>,
    seed: Option<u64>,
}

/// Raw flag values, all optional.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub config: Option<PathBuf>,
    pub delta: Option<String>,
    pub n0: Option<String>,
    pub i_max: Option<usize>,
    pub d: Option<String>,
    pub variant: Option<String>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub delta: f64,
    pub n0: f64,
    pub i_max: usize,
    /// None picks the per-command default (11 for the wave commands, 2..14
    /// for numerology, both appendix dimensions for regularity).
    pub d: Option<DimRange>,
    pub variant: Variant,
    pub out: PathBuf,
    /// None leaves the worker pool at the machine default.
    pub threads: Option<usize>,
    pub nonlinearity_grid: usize,
    pub residual_samples: usize,
    pub amplitude_scales: usize,
    pub scan_step: f64,
    pub seed: u64,
}

impl RunConfig {
    pub fn defaults(command: Command) -> Self {
        RunConfig {
            command,
            delta: DEFAULT_DELTA,
            n0: DEFAULT_N0,
            i_max: DEFAULT_I_MAX,
            d: None,
            variant: Variant::Printed,
            out: PathBuf::from("out"),
            threads: None,
            nonlinearity_grid: 24,
            residual_samples: 40,
            amplitude_scales: 4,
            scan_step: 1e-3,
            seed: 7,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(self.delta > 0.0 && self.delta <= 0.125) {
            return Err(Error::Config(format!("delta = {} outside (0, 1/8]", self.delta)));
        }
        if !(self.n0 > 1.0 && self.n0.powf(1.5) > 2.0) {
            return Err(Error::Config(format!("n0 = {} violates N0^(3/2) > 2", self.n0)));
        }
        if !(2..=12).contains(&self.i_max) {
            return Err(Error::Config(format!("imax = {} outside 2..=12", self.i_max)));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be positive".into()));
        }
        if self.nonlinearity_grid < 2 || self.residual_samples == 0 || self.amplitude_scales == 0 {
            return Err(Error::Config("grid densities must be positive (nonlinearity_grid >= 2)".into()));
        }
        if !(self.scan_step > 0.0 && self.scan_step <= 0.5) {
            return Err(Error::Config(format!("scan_step = {} outside (0, 1/2]", self.scan_step)));
        }
        if let Some(d) = self.d {
            let ok = match self.command {
                Command::Numerology => true,
                Command::Regularity => d.lo == d.hi && (d.lo == 9 || d.lo == 10),
                _ => d == DimRange::single(11),
            };
            if !ok {
                return Err(Error::Config(format!("d = {}..{} not supported by this command", d.lo, d.hi)));
            }
        }
        Ok(())
    }
}

/// File first, then flags, then validation.
pub fn parse_config(command: Command, flags: &Overrides) -> Result<RunConfig, Error> {
    let file = match &flags.config {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            serde_json::from_str::<FileConfig>(&text).map_err(|e| {
                let msg = format!("{}: {e}", path.display());
                if e.to_string().contains("unknown field") {
                    Error::UnknownKey(msg)
                } else {
                    Error::Malformed(msg)
                }
            })?
        }
        None => FileConfig::default(),
    };
    let mut cfg = RunConfig::defaults(command);
    if let Some(x) = &file.delta {
        cfg.delta = x.value()?;
    }
    if let Some(x) = &file.n0 {
        cfg.n0 = x.value()?;
    }
    cfg.i_max = file.i_max.unwrap_or(cfg.i_max);
    match &file.d {
        Some(DimOrText::Dim(d)) => cfg.d = Some(DimRange::parse(&d.to_string())?),
        Some(DimOrText::Text(s)) => cfg.d = Some(DimRange::parse(s)?),
        None => {}
    }
    if let Some(v) = &file.variant {
        cfg.variant = v.parse()?;
    }
    cfg.out = file.out.unwrap_or(cfg.out);
    cfg.threads = file.threads.or(cfg.threads);
    cfg.nonlinearity_grid = file.nonlinearity_grid.unwrap_or(cfg.nonlinearity_grid);
    cfg.residual_samples = file.residual_samples.unwrap_or(cfg.residual_samples);
    cfg.amplitude_scales = file.amplitude_scales.unwrap_or(cfg.amplitude_scales);
    cfg.scan_step = file.scan_step.unwrap_or(cfg.scan_step);
    cfg.seed = file.seed.unwrap_or(cfg.seed);

    if let Some(s) = &flags.delta {
        cfg.delta = parse_real(s)?;
    }
    if let Some(s) = &flags.n0 {
        cfg.n0 = parse_real(s)?;
    }
    cfg.i_max = flags.i_max.unwrap_or(cfg.i_max);
    if let Some(s) = &flags.d {
        cfg.d = Some(DimRange::parse(s)?);
    }
    if let Some(v) = &flags.variant {
        cfg.variant = v.parse()?;
    }
    if let Some(o) = &flags.out {
        cfg.out = o.clone();
    }
    cfg.threads = flags.threads.or(cfg.threads);
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub version: &'static str,
    pub config: RunConfig,
    pub certificates: BTreeMap<String, Value>,
    /// Module failures; results of the other modules are kept.
    pub errors: BTreeMap<String, String>,
    pub pass: bool,
    /// Written to timings.json rather than report.json so the report stays
    /// byte-identical across runs.
    #[serde(skip)]
    pub timings: BTreeMap<String, f64>,
}

struct Module {
    certificate: Value,
    pass: bool,
}

fn csv_file(path: &Path) -> Result<BufWriter<File>, Error> {
    Ok(BufWriter::new(File::create(path)?))
}

fn run_freewave(cfg: &RunConfig, field: &FreeWaveField) -> Result<Module, Error> {
    let opts = FreeWaveOptions { seed: cfg.seed, ..FreeWaveOptions::default() };
    let cert = certify_freewave(field, &opts)?;
    let mut w = csv::Writer::from_writer(csv_file(&cfg.out.join("decay.csv"))?);
    for row in &cert.decay.rows {
        w.serialize(row).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    }
    w.flush()?;
    let mut certificate = serde_json::to_value(&cert)?;
    certificate["pass"] = json!(cert.pass());
    Ok(Module { pass: cert.pass(), certificate })
}

fn run_blowup(cfg: &RunConfig, field: Arc<FreeWaveField>) -> Result<Module, Error> {
    let opts = FreeWaveOptions::default();
    let corner = corner_certificate(&field, opts.corner_grid, opts.corner_outside, cfg.seed + 2)?;
    let mut bc = BlowupConfig::new(field, cfg.delta, cfg.n0, cfg.i_max)?;
    bc.check_corner(corner.nbhd_radius);
    let cascade = certify_cascade(&bc, Some(&corner))?;
    let nonlinearity = nonlinearity_cascade(&bc, cfg.nonlinearity_grid)?;
    write_f_table(csv_file(&cfg.out.join("f_table.csv"))?, &nonlinearity.patches)?;
    let residual = residual_and_amplitude(&bc, cfg.amplitude_scales, cfg.residual_samples)?;
    let pass = corner.pass && cascade.pass && nonlinearity.pass && residual.pass;
    let certificate = json!({
        "config": bc.summary(),
        "corner": corner,
        "construction": cascade,
        "nonlinearity": nonlinearity,
        "residual_amplitude": residual,
        "pass": pass,
    });
    Ok(Module { certificate, pass })
}

fn run_numerology(cfg: &RunConfig) -> Result<Module, Error> {
    let range = cfg.d.unwrap_or(DimRange { lo: 2, hi: 14 });
    let rows = (range.lo..=range.hi).map(exponents::ansatz_feasibility).collect::<Result<Vec<_>, _>>()?;
    let pass = rows.iter().all(|r| r.feasible == (r.d >= 11) && r.slack == r.discriminant);
    Ok(Module { certificate: json!({ "rows": rows, "pass": pass }), pass })
}

fn emit_curve(out: &Path, name: &str, title: &str, curves: &[&exponents::RegularityCurve]) -> Result<(), Error> {
    exponents::write_csv(csv_file(&out.join(format!("{name}.csv")))?, curves[0])?;
    exponents::write_svg(csv_file(&out.join(format!("{name}.svg")))?, title, curves)
}

fn run_regularity(cfg: &RunConfig) -> Result<Module, Error> {
    match cfg.d {
        Some(d) => {
            let (hi, name) = if d.lo == 9 { (3.5, "fig9d") } else { (4.0, "fig10d") };
            let curve = exponents::regularity_scan(d.lo, 1.0, hi, cfg.scan_step, cfg.variant)?;
            let pass = if d.lo == 9 {
                curve.gap_intervals.is_empty()
            } else {
                curve.gap_intervals.iter().any(|&(a, b)| a <= 2.0 && b >= 3.0)
            };
            emit_curve(&cfg.out, name, &format!("d = {}: c(2s) against 1 - s", d.lo), &[&curve])?;
            Ok(Module { certificate: json!({ "curve": curve, "pass": pass }), pass })
        }
        None => {
            let ledger = exponents::regularity_ledger(cfg.scan_step)?;
            emit_curve(&cfg.out, "fig9d", "d = 9: c(2s) against 1 - s", &[&ledger.d9])?;
            emit_curve(&cfg.out, "fig10d", "d = 10: c(2s) against 1 - s", &[&ledger.d10_printed, &ledger.d10_corrected])?;
            exponents::write_csv(csv_file(&cfg.out.join("fig10d_corrected.csv"))?, &ledger.d10_corrected)?;
            Ok(Module { pass: ledger.pass, certificate: serde_json::to_value(&ledger)? })
        }
    }
}

/// Runs the selected modules. Module errors are recorded in the report and
/// fail it; I/O errors on the output directory abort.
pub fn run_pipeline(cfg: &RunConfig) -> Result<Report, Error> {
    fs::create_dir_all(&cfg.out)?;
    let wave = matches!(cfg.command, Command::Freewave | Command::Blowup | Command::All);
    let field = if wave { Some(Arc::new(FreeWaveField::standard()?)) } else { None };
    let selected: Vec<&str> = match cfg.command {
        Command::Freewave => vec!["freewave"],
        Command::Blowup => vec!["blowup"],
        Command::Numerology => vec!["numerology"],
        Command::Regularity => vec!["regularity"],
        Command::All => vec!["freewave", "blowup", "numerology", "regularity"],
    };
    let mut report = Report {
        version: env!("CARGO_PKG_VERSION"),
        config: cfg.clone(),
        certificates: BTreeMap::new(),
        errors: BTreeMap::new(),
        pass: true,
        timings: BTreeMap::new(),
    };
    for name in selected {
        let start = Instant::now();
        let result = match name {
            "freewave" => run_freewave(cfg, field.as_ref().expect("field built for wave commands")),
            "blowup" => run_blowup(cfg, field.clone().expect("field built for wave commands")),
            "numerology" => run_numerology(cfg),
            _ => run_regularity(cfg),
        };
        report.timings.insert(name.to_string(), start.elapsed().as_secs_f64());
        match result {
            Ok(m) => {
                report.pass &= m.pass;
                report.certificates.insert(name.to_string(), m.certificate);
            }
            Err(Error::Io(e)) => return Err(Error::Io(e)),
            Err(e) => {
                report.pass = false;
                report.errors.insert(name.to_string(), e.to_string());
            }
        }
    }
    serde_json::to_writer_pretty(csv_file(&cfg.out.join("report.json"))?, &report)?;
    serde_json::to_writer_pretty(csv_file(&cfg.out.join("timings.json"))?, &report.timings)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fractions_and_ranges() {
        assert_eq!(parse_real("1/64").unwrap(), 1.0 / 64.0);
        assert_eq!(DimRange::parse("9..14").unwrap(), DimRange { lo: 9, hi: 14 });
        assert!(matches!(DimRange::parse("x"), Err(Error::Malformed(_))));
    }
}
