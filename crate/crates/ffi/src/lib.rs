//! C ABI over blowup-lab. Every call returns a `BlStatus`; on failure the
//! message is kept per thread and read back with `bl_last_error`.
//! Handles are opaque and released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::sync::Arc;

use blowup_lab::blowup::physical::eval_physical;
use blowup_lab::blowup::residual::amplitude;
use blowup_lab::blowup::{BlowupConfig, ScaledReal};
use blowup_lab::cli::{parse_config, run_pipeline, Command, Overrides};
use blowup_lab::exponents::{self, Variant};
use blowup_lab::freewave::FreeWaveField;
use blowup_lab::Error;
use num_rational::Rational64;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    NoConvergence = 4,
    OutsidePatch = 5,
    Numerical = 6,
    Io = 7,
    Panic = 8,
}

/// mantissa · N₀^(q_num/q_den). `log10` is filled on output and ignored on input.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct BlScaled {
    pub mantissa: f64,
    pub q_num: i64,
    pub q_den: i64,
    pub log10: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct BlExponentLedger {
    pub d: i64,
    pub alpha_num: i64,
    pub alpha_den: i64,
    pub discriminant_num: i64,
    pub discriminant_den: i64,
    pub step_num: i64,
    pub step_den: i64,
    pub feasible: bool,
}

/// Free wave V = (v₁, v₂) in eleven dimensions.
pub struct BlField(Arc<FreeWaveField>);

/// Blowup construction parameters bound to a field.
pub struct BlBlowup(BlowupConfig);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> BlStatus {
    match e {
        Error::Config(_) | Error::UnknownKey(_) | Error::Malformed(_) | Error::UnsupportedDimension(_) => BlStatus::Config,
        Error::NoConvergence { .. } => BlStatus::NoConvergence,
        Error::OutsidePatch(_) => BlStatus::OutsidePatch,
        Error::Io(_) | Error::Json(_) => BlStatus::Io,
        Error::Quadrature(_) | Error::OrderOverflow { .. } => BlStatus::Numerical,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (BlStatus, String)>) -> BlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BlStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside blowup-lab".into());
            BlStatus::Panic
        }
    }
}

fn lib(e: Error) -> (BlStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(name: &str) -> (BlStatus, String) {
    (BlStatus::NullPointer, format!("{name} is null"))
}

fn invalid(msg: impl Into<String>) -> (BlStatus, String) {
    (BlStatus::InvalidArgument, msg.into())
}

unsafe fn text<'a>(p: *const c_char, name: &str) -> Result<&'a str, (BlStatus, String)> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p).to_str().map_err(|_| invalid(format!("{name} is not UTF-8")))
}

fn to_scaled(x: &BlScaled, n0: f64) -> Result<ScaledReal, (BlStatus, String)> {
    if x.q_den == 0 || !x.mantissa.is_finite() {
        return Err(invalid("scaled value needs q_den != 0 and a finite mantissa"));
    }
    Ok(ScaledReal::from_f64(x.mantissa, n0).shift(Rational64::new(x.q_num, x.q_den)))
}

fn from_scaled(x: &ScaledReal) -> BlScaled {
    BlScaled { mantissa: x.mantissa, q_num: *x.q.numer(), q_den: *x.q.denom(), log10: x.log10_abs() }
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length in bytes.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn bl_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Builds the standard k = 5 free wave.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bl_field_new(out: *mut *mut BlField) -> BlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let field = FreeWaveField::standard().map_err(lib)?;
        *out = Box::into_raw(Box::new(BlField(Arc::new(field))));
        Ok(())
    })
}

/// # Safety
/// `field` must come from `bl_field_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bl_field_free(field: *mut BlField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// V(t, r) into `out[0..2]`.
///
/// # Safety
/// `field` must be a live handle and `out` valid for two doubles.
#[no_mangle]
pub unsafe extern "C" fn bl_field_value(field: *const BlField, t: f64, r: f64, out: *mut f64) -> BlStatus {
    guard(|| {
        let field = field.as_ref().ok_or_else(|| null("field"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        if !(t.is_finite() && r.is_finite() && r >= 0.0) {
            return Err(invalid("need finite t and r >= 0"));
        }
        let v = field.0.value(t, r).map_err(lib)?;
        std::ptr::copy_nonoverlapping(v.as_ptr(), out, 2);
        Ok(())
    })
}

/// Cone half-width ε of the free wave.
///
/// # Safety
/// `field` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bl_field_epsilon(field: *const BlField, out: *mut f64) -> BlStatus {
    guard(|| {
        let field = field.as_ref().ok_or_else(|| null("field"))?;
        *out.as_mut().ok_or_else(|| null("out"))? = field.0.epsilon;
        Ok(())
    })
}

/// Construction with cutoff width `delta`, base `n0` and scales up to `i_max`.
/// The handle keeps its own reference to the field.
///
/// # Safety
/// `field` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bl_blowup_new(
    field: *const BlField,
    delta: f64,
    n0: f64,
    i_max: usize,
    out: *mut *mut BlBlowup,
) -> BlStatus {
    guard(|| {
        let field = field.as_ref().ok_or_else(|| null("field"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg = BlowupConfig::new(field.0.clone(), delta, n0, i_max).map_err(lib)?;
        *out = Box::into_raw(Box::new(BlBlowup(cfg)));
        Ok(())
    })
}

/// # Safety
/// `h` must come from `bl_blowup_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bl_blowup_free(h: *mut BlBlowup) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// U(t, y) summed over scales, y = |x|². Components go to `out[0..2]`.
///
/// # Safety
/// `h` must be a live handle, `t` and `y` readable, `out` valid for two values.
#[no_mangle]
pub unsafe extern "C" fn bl_blowup_eval(h: *const BlBlowup, t: *const BlScaled, y: *const BlScaled, out: *mut BlScaled) -> BlStatus {
    guard(|| {
        let h = h.as_ref().ok_or_else(|| null("handle"))?;
        let t = to_scaled(t.as_ref().ok_or_else(|| null("t"))?, h.0.n0)?;
        let y = to_scaled(y.as_ref().ok_or_else(|| null("y"))?, h.0.n0)?;
        if out.is_null() {
            return Err(null("out"));
        }
        if y.mantissa < 0.0 {
            return Err(invalid("y must be non-negative"));
        }
        let v = eval_physical(&h.0, &t, &y).map_err(lib)?;
        *out = from_scaled(&v.value[0]);
        *out.add(1) = from_scaled(&v.value[1]);
        Ok(())
    })
}

/// |U(δ/N_j, 0)| / N_j^{3/2} for j = 1..=j_max into `out[0..j_max]`.
///
/// # Safety
/// `h` must be a live handle and `out` valid for `j_max` doubles.
#[no_mangle]
pub unsafe extern "C" fn bl_blowup_amplitude(h: *const BlBlowup, j_max: usize, out: *mut f64) -> BlStatus {
    guard(|| {
        let h = h.as_ref().ok_or_else(|| null("handle"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        if j_max == 0 {
            return Err(invalid("j_max must be positive"));
        }
        let rep = amplitude(&h.0, j_max).map_err(lib)?;
        for (k, row) in rep.rows.iter().enumerate() {
            *out.add(k) = row.ratio;
        }
        Ok(())
    })
}

/// Exact ansatz ledger for dimension `d`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bl_ansatz_feasibility(d: i64, out: *mut BlExponentLedger) -> BlStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let l = exponents::ansatz_feasibility(d).map_err(lib)?;
        *out = BlExponentLedger {
            d,
            alpha_num: *l.alpha.numer(),
            alpha_den: *l.alpha.denom(),
            discriminant_num: *l.discriminant.numer(),
            discriminant_den: *l.discriminant.denom(),
            step_num: *l.step_exponent.numer(),
            step_den: *l.step_exponent.denom(),
            feasible: l.feasible,
        };
        Ok(())
    })
}

/// c(p) for d = 9 or 10; `corrected` selects the 8/p reading of the d = 10 first branch.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bl_c_of_p(d: i64, p: f64, corrected: bool, out: *mut f64) -> BlStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let v = if corrected { Variant::Corrected } else { Variant::Printed };
        *out = exponents::c_of_p(d, p, v).map_err(lib)?;
        Ok(())
    })
}

/// Runs a `verify` subcommand ("freewave", "blowup", "numerology",
/// "regularity", "all") with an optional JSON config file, writing artifacts
/// under `out_dir`. `pass` receives the overall verdict.
///
/// # Safety
/// `command` and `out_dir` must be NUL-terminated strings, `config_path`
/// null or NUL-terminated, `pass` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bl_run(command: *const c_char, config_path: *const c_char, out_dir: *const c_char, pass: *mut bool) -> BlStatus {
    guard(|| {
        let cmd = match text(command, "command")? {
            "freewave" => Command::Freewave,
            "blowup" => Command::Blowup,
            "numerology" => Command::Numerology,
            "regularity" => Command::Regularity,
            "all" => Command::All,
            other => return Err(invalid(format!("unknown command {other:?}"))),
        };
        let config = if config_path.is_null() { None } else { Some(PathBuf::from(text(config_path, "config_path")?)) };
        let flags = Overrides { config, out: Some(PathBuf::from(text(out_dir, "out_dir")?)), ..Overrides::default() };
        let pass = pass.as_mut().ok_or_else(|| null("pass"))?;
        let cfg = parse_config(cmd, &flags).map_err(lib)?;
        *pass = run_pipeline(&cfg).map_err(lib)?.pass;
        Ok(())
    })
}
