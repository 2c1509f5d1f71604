//! C ABI over the `angmom` core.
//!
//! Objects are opaque handles created by `am_*_new`/`am_*` constructors and
//! released with the matching `am_*_free`. Every fallible call returns an
//! [`AmStatus`]; on failure a message is available from
//! [`am_last_error_message`] on the same thread. Strings returned by the
//! library are released with [`am_string_free`].

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use angmom::num_complex::Complex64;
use angmom::scenario::{run_scenario, ScenarioConfig};
use angmom::{
    entanglement_entropy, interactions, CompositeState, Error, ModeWavefunction, SubsystemLabel,
};

/// Status codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Wrap = 4,
    ZeroProbability = 5,
    Io = 6,
    /// The call succeeded but a checked invariant failed.
    InvariantViolation = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmLabel {
    System = 0,
    Preparer = 1,
    GrandPreparer = 2,
    Meter = 3,
}

impl From<AmLabel> for SubsystemLabel {
    fn from(l: AmLabel) -> Self {
        match l {
            AmLabel::System => SubsystemLabel::System,
            AmLabel::Preparer => SubsystemLabel::Preparer,
            AmLabel::GrandPreparer => SubsystemLabel::GrandPreparer,
            AmLabel::Meter => SubsystemLabel::Meter,
        }
    }
}

/// Opaque single-mode wavefunction.
pub struct AmWavefunction(ModeWavefunction);

/// Opaque joint state.
pub struct AmState(CompositeState);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> AmStatus {
    match e {
        Error::Config(_) | Error::Json(_) => AmStatus::Config,
        Error::Wrap { .. } => AmStatus::Wrap,
        Error::ZeroProbability { .. } => AmStatus::ZeroProbability,
        Error::Io(_) | Error::Csv(_) => AmStatus::Io,
        _ => AmStatus::InvalidArgument,
    }
}

/// Run `f`, translating errors and panics into status codes.
fn guard<F: FnOnce() -> Result<AmStatus, (AmStatus, String)>>(f: F) -> AmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            AmStatus::Panic
        }
    }
}

fn lift<T>(r: angmom::Result<T>) -> Result<T, (AmStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (AmStatus, String) {
    (AmStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (AmStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<AmStatus, (AmStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(AmStatus::Ok)
}

/// Message for the last failed call on this thread, or null. Free with
/// [`am_string_free`].
#[no_mangle]
pub extern "C" fn am_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        Some(c) => c.clone().into_raw(),
        None => ptr::null_mut(),
    })
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn am_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// The eigenstate `|l>` on a lattice of size `dim`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn am_wavefunction_basis(dim: i64, l: i64, out: *mut *mut AmWavefunction) -> AmStatus {
    guard(|| store(out, AmWavefunction(lift(ModeWavefunction::basis_state(dim, l))?)))
}

/// Equal amplitudes on `lo..=hi`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn am_wavefunction_uniform(
    dim: i64,
    lo: i64,
    hi: i64,
    out: *mut *mut AmWavefunction,
) -> AmStatus {
    guard(|| store(out, AmWavefunction(lift(ModeWavefunction::uniform(dim, lo, hi))?)))
}

/// Normalized superposition of `len` terms `(ls[i], re[i] + i im[i])`.
/// `im` may be null for real amplitudes.
///
/// # Safety
/// `ls` and `re` (and `im` if non-null) must point to `len` elements; `out`
/// must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn am_wavefunction_from_terms(
    dim: i64,
    ls: *const i64,
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut *mut AmWavefunction,
) -> AmStatus {
    guard(|| {
        if len > 0 && (ls.is_null() || re.is_null()) {
            return Err(null("terms"));
        }
        let terms: Vec<(i64, Complex64)> = (0..len)
            .map(|i| {
                let imag = if im.is_null() { 0.0 } else { *im.add(i) };
                (*ls.add(i), Complex64::new(*re.add(i), imag))
            })
            .collect();
        let (psi, _) = lift(ModeWavefunction::superposition(dim, terms))?;
        store(out, AmWavefunction(psi))
    })
}

/// # Safety
/// `w` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn am_wavefunction_dim(w: *const AmWavefunction) -> usize {
    w.as_ref().map_or(0, |w| w.0.dim())
}

/// Amplitude at `l` (reduced modulo the lattice size).
///
/// # Safety
/// `w` must be a live handle; `re` and `im` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn am_wavefunction_amp(
    w: *const AmWavefunction,
    l: i64,
    re: *mut f64,
    im: *mut f64,
) -> AmStatus {
    guard(|| {
        let w = deref(w, "wavefunction")?;
        if re.is_null() || im.is_null() {
            return Err(null("out"));
        }
        let a = w.0.amp(l);
        *re = a.re;
        *im = a.im;
        Ok(AmStatus::Ok)
    })
}

/// # Safety
/// `w` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn am_wavefunction_free(w: *mut AmWavefunction) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// Product state of `n` labeled wavefunctions.
///
/// # Safety
/// `labels` and `parts` must point to `n` elements; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn am_state_product(
    labels: *const AmLabel,
    parts: *const *const AmWavefunction,
    n: usize,
    out: *mut *mut AmState,
) -> AmStatus {
    guard(|| {
        if labels.is_null() || parts.is_null() {
            return Err(null("labels or parts"));
        }
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            let w = deref(*parts.add(i), "part")?;
            v.push(((*labels.add(i)).into(), w.0.clone()));
        }
        store(out, AmState(lift(CompositeState::tensor(&v))?))
    })
}

/// # Safety
/// `s` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn am_state_free(s: *mut AmState) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Shift-prepare `target` from `source` into `profile`. Wrapping is an error.
///
/// # Safety
/// Handles must be live; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn am_state_shift_prepare(
    s: *const AmState,
    source: AmLabel,
    target: AmLabel,
    profile: *const AmWavefunction,
    out: *mut *mut AmState,
) -> AmStatus {
    guard(|| {
        let s = deref(s, "state")?;
        let p = deref(profile, "profile")?;
        let next = lift(interactions::shift_prepare(&s.0, source.into(), target.into(), &p.0))?;
        store(out, AmState(next))
    })
}

/// Copy the momentum of `source` into the pointer `meter`.
///
/// # Safety
/// `s` must be live; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn am_state_pointer_couple(
    s: *const AmState,
    source: AmLabel,
    meter: AmLabel,
    out: *mut *mut AmState,
) -> AmStatus {
    guard(|| {
        let s = deref(s, "state")?;
        store(out, AmState(lift(interactions::pointer_couple(&s.0, source.into(), meter.into()))?))
    })
}

/// # Safety
/// `s` must be live; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn am_state_swap(s: *const AmState, a: AmLabel, b: AmLabel, out: *mut *mut AmState) -> AmStatus {
    guard(|| {
        let s = deref(s, "state")?;
        store(out, AmState(lift(interactions::swap_states(&s.0, a.into(), b.into()))?))
    })
}

/// Entanglement entropy in bits of `label` with the rest of the state.
///
/// # Safety
/// `s` must be live; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn am_state_entropy(s: *const AmState, label: AmLabel, out: *mut f64) -> AmStatus {
    guard(|| {
        let s = deref(s, "state")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = lift(entanglement_entropy(&s.0, label.into()))?;
        Ok(AmStatus::Ok)
    })
}

/// Probability that the total momentum over the `n` scope labels equals
/// `total`.
///
/// # Safety
/// `s` must be live; `scope` must point to `n` labels; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn am_state_total_probability(
    s: *const AmState,
    scope: *const AmLabel,
    n: usize,
    total: i64,
    out: *mut f64,
) -> AmStatus {
    guard(|| {
        let s = deref(s, "state")?;
        if scope.is_null() || out.is_null() {
            return Err(null("scope or out"));
        }
        let scope: Vec<SubsystemLabel> = (0..n).map(|i| (*scope.add(i)).into()).collect();
        let dist = lift(s.0.total_l_distribution(&scope))?;
        *out = dist.get(&total).copied().unwrap_or(0.0);
        Ok(AmStatus::Ok)
    })
}

/// Run a TOML scenario and return its JSON report in `out_json`. Returns
/// [`AmStatus::InvariantViolation`] (with the report still written) when a
/// checked invariant fails.
///
/// # Safety
/// `toml` must be a NUL-terminated string; `out_json` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn am_run_scenario(toml: *const c_char, out_json: *mut *mut c_char) -> AmStatus {
    guard(|| {
        if toml.is_null() || out_json.is_null() {
            return Err(null("toml or out_json"));
        }
        let text = CStr::from_ptr(toml)
            .to_str()
            .map_err(|e| (AmStatus::InvalidArgument, format!("scenario is not utf-8: {e}")))?;
        let config = lift(ScenarioConfig::from_toml_str(text))?;
        let report = lift(run_scenario(&config))?;
        let json = lift(report.to_json())?;
        *out_json = CString::new(json).expect("json has no NUL").into_raw();
        if report.has_violations() {
            set_error(report.violations.join("; "));
            Ok(AmStatus::InvariantViolation)
        } else {
            Ok(AmStatus::Ok)
        }
    })
}
