//! C ABI over the `entcert` library. Objects are opaque handles released with
//! their `_free` function; every fallible call returns an [`EntcertStatus`]
//! and leaves a message for [`entcert_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use entcert::analyze::analyze_bipartite;
use entcert::criteria::{self, SearchBudget};
use entcert::io::{self, StateData};
use entcert::linalg::{c, CMatrix};
use entcert::{BipartiteState, Certificate, Error, Verdict};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntcertStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Dimension = 3,
    NotPsd = 4,
    Numerical = 5,
    Precondition = 6,
    SearchExhausted = 7,
    Parse = 8,
    Io = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntcertVerdict {
    Separable = 0,
    Ppt = 1,
    PptEntangled = 2,
    Distillable = 3,
    Undecided = 4,
}

/// Opaque bipartite state.
pub struct EntcertState {
    inner: BipartiteState,
}

/// Opaque certificate, together with the state it certifies.
pub struct EntcertCertificate {
    cert: Certificate,
    rho: BipartiteState,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let s = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn status_of(e: &Error) -> EntcertStatus {
    match e {
        Error::Dimension(_) => EntcertStatus::Dimension,
        Error::NotHermitian { .. } | Error::NotPsd { .. } | Error::ZeroTrace | Error::ZeroVector => EntcertStatus::NotPsd,
        Error::Precondition(_) | Error::SingularBlock { .. } => EntcertStatus::Precondition,
        Error::SearchExhausted(_) => EntcertStatus::SearchExhausted,
        Error::Parse { .. } | Error::Format(_) => EntcertStatus::Parse,
        Error::Io(_) => EntcertStatus::Io,
        Error::Tolerance(_) | Error::InvalidParameter(_) => EntcertStatus::InvalidArgument,
        Error::Numerical(_) => EntcertStatus::Numerical,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (EntcertStatus, String)>) -> EntcertStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EntcertStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            EntcertStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (EntcertStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (EntcertStatus, String) {
    (EntcertStatus::NullPointer, format!("{what} is null"))
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn entcert_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn entcert_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Build a state from row-major real and imaginary parts of a
/// `(dim_a·dim_b)²` matrix. `im` may be null for a real matrix.
///
/// # Safety
/// `re` (and `im` when non-null) must point to `(dim_a·dim_b)²` doubles;
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn entcert_state_new(
    dim_a: usize,
    dim_b: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut EntcertState,
) -> EntcertStatus {
    guard(|| {
        if re.is_null() {
            return Err(null("re"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let d = dim_a
            .checked_mul(dim_b)
            .filter(|&d| d > 0 && d <= 4096)
            .ok_or((EntcertStatus::Dimension, "dimensions must be positive and small".to_string()))?;
        let re = std::slice::from_raw_parts(re, d * d);
        let im = (!im.is_null()).then(|| std::slice::from_raw_parts(im, d * d));
        let m = CMatrix::from_fn(d, d, |i, j| c(re[i * d + j], im.map_or(0.0, |v| v[i * d + j])));
        let inner = BipartiteState::new(dim_a, dim_b, m).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(EntcertState { inner }));
        Ok(())
    })
}

/// Load a bipartite state (or bipartite fixture) from a state file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn entcert_state_from_file(path: *const c_char, out: *mut *mut EntcertState) -> EntcertStatus {
    guard(|| {
        if path.is_null() {
            return Err(null("path"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let p = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| (EntcertStatus::InvalidArgument, "path is not UTF-8".to_string()))?;
        let loaded = io::read_state_file(Path::new(p)).map_err(lib_err)?;
        let inner = match loaded.data {
            StateData::Bipartite(rho) => rho,
            StateData::Fixture(spec) => match entcert::families::make_fixture(&spec).map_err(lib_err)? {
                entcert::families::Fixture::Bipartite(rho) => rho,
                _ => return Err((EntcertStatus::InvalidArgument, "fixture is not bipartite".into())),
            },
            _ => return Err((EntcertStatus::InvalidArgument, "file does not hold a bipartite state".into())),
        };
        *out = Box::into_raw(Box::new(EntcertState { inner }));
        Ok(())
    })
}

/// # Safety
/// `state` must come from this library (or be null) and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn entcert_state_free(state: *mut EntcertState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// # Safety
/// `state` must be a live handle; `dim_a`, `dim_b`, `rank` writable.
#[no_mangle]
pub unsafe extern "C" fn entcert_state_shape(
    state: *const EntcertState,
    dim_a: *mut usize,
    dim_b: *mut usize,
    rank: *mut usize,
) -> EntcertStatus {
    guard(|| {
        let s = state.as_ref().ok_or_else(|| null("state"))?;
        if dim_a.is_null() || dim_b.is_null() || rank.is_null() {
            return Err(null("output"));
        }
        *dim_a = s.inner.dim_a();
        *dim_b = s.inner.dim_b();
        *rank = s.inner.rank();
        Ok(())
    })
}

/// PPT test; `min_eig` receives the smallest partial-transpose eigenvalue.
///
/// # Safety
/// `state` must be a live handle; `ppt` and `min_eig` writable.
#[no_mangle]
pub unsafe extern "C" fn entcert_is_ppt(state: *const EntcertState, ppt: *mut bool, min_eig: *mut f64) -> EntcertStatus {
    guard(|| {
        let s = state.as_ref().ok_or_else(|| null("state"))?;
        if ppt.is_null() || min_eig.is_null() {
            return Err(null("output"));
        }
        let (p, m) = criteria::is_ppt(&s.inner);
        *ppt = p;
        *min_eig = m;
        Ok(())
    })
}

/// Full analysis with the default search budget and the given seed.
///
/// # Safety
/// `state` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn entcert_analyze(
    state: *const EntcertState,
    seed: u64,
    out: *mut *mut EntcertCertificate,
) -> EntcertStatus {
    guard(|| {
        let s = state.as_ref().ok_or_else(|| null("state"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let cert = analyze_bipartite(&s.inner, &SearchBudget::with_seed(seed)).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(EntcertCertificate {
            cert,
            rho: s.inner.clone(),
        }));
        Ok(())
    })
}

/// # Safety
/// `cert` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn entcert_certificate_verdict(
    cert: *const EntcertCertificate,
    out: *mut EntcertVerdict,
) -> EntcertStatus {
    guard(|| {
        let h = cert.as_ref().ok_or_else(|| null("certificate"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = match h.cert.verdict {
            Verdict::Separable { .. } => EntcertVerdict::Separable,
            Verdict::Ppt { .. } => EntcertVerdict::Ppt,
            Verdict::PptEntangled { .. } => EntcertVerdict::PptEntangled,
            Verdict::Distillable { .. } => EntcertVerdict::Distillable,
            Verdict::Undecided { .. } => EntcertVerdict::Undecided,
        };
        Ok(())
    })
}

/// Re-check the certificate against its state.
///
/// # Safety
/// `cert` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn entcert_certificate_validate(cert: *const EntcertCertificate) -> EntcertStatus {
    guard(|| {
        let h = cert.as_ref().ok_or_else(|| null("certificate"))?;
        h.cert.validate(&h.rho).map(|_| ()).map_err(lib_err)
    })
}

/// Certificate as JSON; release the string with [`entcert_string_free`].
///
/// # Safety
/// `cert` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn entcert_certificate_json(
    cert: *const EntcertCertificate,
    out: *mut *mut c_char,
) -> EntcertStatus {
    guard(|| {
        let h = cert.as_ref().ok_or_else(|| null("certificate"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let reval = h.cert.validate(&h.rho).map_err(lib_err)?;
        let text = io::certificate_json(&h.cert, Some(&reval)).to_string();
        *out = CString::new(text).map_err(|e| (EntcertStatus::Panic, e.to_string()))?.into_raw();
        Ok(())
    })
}

/// # Safety
/// `cert` must come from this library (or be null) and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn entcert_certificate_free(cert: *mut EntcertCertificate) {
    if !cert.is_null() {
        drop(Box::from_raw(cert));
    }
}

/// # Safety
/// `s` must come from this library (or be null).
#[no_mangle]
pub unsafe extern "C" fn entcert_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
