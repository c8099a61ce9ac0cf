//! C ABI over `polytorus`. Polynomials cross the boundary as opaque
//! [`PtPolynomial`] handles; results come back through out parameters and
//! every entry point returns a [`PtStatus`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use polytorus::constants::arestov_lambda;
use polytorus::norms::{lp_norm, mahler_measure, orlicz_luxemburg_norm, Method, NormResult, OrliczSpec};
use polytorus::quadrature::QuadratureSpec;
use polytorus::{Complex, Error, Polynomial};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Parse = 4,
    NotConverged = 5,
    Io = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PtMethod {
    ExactParseval = 0,
    ExactEvenConvolution = 1,
    ExactRoots = 2,
    Quadrature = 3,
    IteratedMixed = 4,
    MonteCarlo = 5,
}

impl From<Method> for PtMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::ExactParseval => PtMethod::ExactParseval,
            Method::ExactEvenConvolution => PtMethod::ExactEvenConvolution,
            Method::ExactRoots => PtMethod::ExactRoots,
            Method::Quadrature => PtMethod::Quadrature,
            Method::IteratedMixed => PtMethod::IteratedMixed,
            Method::MonteCarlo => PtMethod::MonteCarlo,
        }
    }
}

/// Opaque polynomial handle. Free with [`pt_polynomial_free`].
pub struct PtPolynomial {
    inner: Polynomial,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PtNormResult {
    pub value: f64,
    pub error_estimate: f64,
    pub method: PtMethod,
    pub converged: bool,
    /// Grid nodes where `|P|` fell below the log clamp.
    pub clamped_nodes: usize,
    pub near_unit_roots: bool,
}

impl From<&NormResult> for PtNormResult {
    fn from(r: &NormResult) -> Self {
        PtNormResult {
            value: r.value,
            error_estimate: r.error_estimate,
            method: r.method.into(),
            converged: r.converged,
            clamped_nodes: r.flags.clamped_nodes,
            near_unit_roots: r.flags.near_unit_roots,
        }
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PtLambda {
    pub gamma_form: f64,
    pub integral_form: f64,
    pub consistency_gap: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(PtStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Json(_) => PtStatus::Parse,
            Error::RootsNotConverged { .. } => PtStatus::NotConverged,
            Error::Io { .. } | Error::Csv(_) => PtStatus::Io,
            _ => PtStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("interior NULs replaced");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(msg));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PtStatus {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PtStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            PtStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(PtStatus::NullPointer, format!("`{what}` is NULL"))
}

unsafe fn handle<'a>(poly: *const PtPolynomial) -> Result<&'a Polynomial, Failure> {
    poly.as_ref().map(|h| &h.inner).ok_or_else(|| null("poly"))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(value);
    Ok(())
}

unsafe fn c_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| Failure(PtStatus::InvalidUtf8, format!("`{what}` is not UTF-8: {e}")))
}

fn default_quadrature(p: &Polynomial, rel_tol: f64) -> Result<QuadratureSpec, Failure> {
    let mut spec = QuadratureSpec::for_dimension(p.compress_variables().0.n());
    if rel_tol > 0.0 {
        spec.rel_tol = rel_tol;
        spec.validate()?;
    }
    Ok(spec)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL after a
/// success. The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn pt_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses a polynomial from its JSON interchange form.
///
/// # Safety
/// `json` must be NULL or a NUL-terminated string; `out` must be NULL or
/// point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn pt_polynomial_from_json(json: *const c_char, out: *mut *mut PtPolynomial) -> PtStatus {
    guard(|| {
        let text = c_str(json, "json")?;
        let inner = Polynomial::from_json(text)?;
        if out.is_null() {
            return Err(null("out"));
        }
        write_out(out, Box::into_raw(Box::new(PtPolynomial { inner })))
    })
}

/// Builds a polynomial in `n` variables from `count` terms. Term `i` has
/// exponents `exponents[i*n .. i*n+n]` and coefficient `re[i] + i·im[i]`;
/// `im` may be NULL for real coefficients.
///
/// # Safety
/// `exponents` must hold `count * n` values and `re` (and `im` unless NULL)
/// `count` values; `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn pt_polynomial_from_terms(
    n: usize,
    count: usize,
    exponents: *const u32,
    re: *const f64,
    im: *const f64,
    out: *mut *mut PtPolynomial,
) -> PtStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if count > 0 && (exponents.is_null() || re.is_null()) {
            return Err(null(if exponents.is_null() { "exponents" } else { "re" }));
        }
        let len = count
            .checked_mul(n)
            .ok_or_else(|| Failure(PtStatus::InvalidArgument, "count * n overflows".into()))?;
        let (exps, re) = if count == 0 {
            (&[][..], &[][..])
        } else {
            (std::slice::from_raw_parts(exponents, len), std::slice::from_raw_parts(re, count))
        };
        let im = if im.is_null() || count == 0 {
            None
        } else {
            Some(std::slice::from_raw_parts(im, count))
        };
        let terms = (0..count).map(|i| {
            let alpha = exps[i * n..(i + 1) * n].iter().map(|&e| i64::from(e)).collect();
            (alpha, Complex::new(re[i], im.map_or(0.0, |v| v[i])))
        });
        let inner = Polynomial::build(n, terms)?;
        write_out(out, Box::into_raw(Box::new(PtPolynomial { inner })))
    })
}

/// Releases a handle. NULL is ignored.
///
/// # Safety
/// `poly` must be NULL or a handle from this library that was not freed yet.
#[no_mangle]
pub unsafe extern "C" fn pt_polynomial_free(poly: *mut PtPolynomial) {
    if !poly.is_null() {
        drop(Box::from_raw(poly));
    }
}

/// Variable count, number of nonzero terms and total degree.
///
/// # Safety
/// `poly` must be a live handle; each out pointer must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn pt_polynomial_shape(
    poly: *const PtPolynomial,
    n_vars: *mut usize,
    n_terms: *mut usize,
    total_degree: *mut u32,
) -> PtStatus {
    guard(|| {
        let p = handle(poly)?;
        if !n_vars.is_null() {
            n_vars.write(p.n());
        }
        if !n_terms.is_null() {
            n_terms.write(p.num_terms());
        }
        if !total_degree.is_null() {
            total_degree.write(p.total_degree());
        }
        Ok(())
    })
}

/// Evaluates at the point `(re[j] + i·im[j])_j` of length `n`.
///
/// # Safety
/// `re` and `im` must hold `n` values; `out_re` and `out_im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pt_polynomial_evaluate(
    poly: *const PtPolynomial,
    n: usize,
    re: *const f64,
    im: *const f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> PtStatus {
    guard(|| {
        let p = handle(poly)?;
        if n > 0 && (re.is_null() || im.is_null()) {
            return Err(null("point"));
        }
        if out_re.is_null() || out_im.is_null() {
            return Err(null("out"));
        }
        let z: Vec<Complex> = (0..n).map(|j| Complex::new(*re.add(j), *im.add(j))).collect();
        let v = p.evaluate(&z)?;
        out_re.write(v.re);
        out_im.write(v.im);
        Ok(())
    })
}

/// Serializes to JSON. Release the string with [`pt_string_free`].
///
/// # Safety
/// `poly` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pt_polynomial_to_json(poly: *const PtPolynomial, out: *mut *mut c_char) -> PtStatus {
    guard(|| {
        let p = handle(poly)?;
        let s = CString::new(p.to_json()).map_err(|e| Failure(PtStatus::InvalidArgument, e.to_string()))?;
        write_out(out, s.into_raw())
    })
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must be NULL or a string from this library that was not freed yet.
#[no_mangle]
pub unsafe extern "C" fn pt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `‖P‖_p`. A `rel_tol` of zero or less keeps the default tolerance.
///
/// # Safety
/// `poly` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pt_lp_norm(
    poly: *const PtPolynomial,
    p: f64,
    rel_tol: f64,
    out: *mut PtNormResult,
) -> PtStatus {
    guard(|| {
        let poly = handle(poly)?;
        let r = lp_norm(poly, p, &default_quadrature(poly, rel_tol)?)?;
        write_out(out, (&r).into())
    })
}

/// Mahler measure.
///
/// # Safety
/// `poly` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pt_mahler_measure(poly: *const PtPolynomial, out: *mut PtNormResult) -> PtStatus {
    guard(|| {
        let r = mahler_measure(handle(poly)?)?;
        write_out(out, (&r).into())
    })
}

/// Luxemburg norm for `ψ(t) = exp(t^alpha) − 1`.
///
/// # Safety
/// `poly` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pt_orlicz_norm(poly: *const PtPolynomial, alpha: f64, out: *mut PtNormResult) -> PtStatus {
    guard(|| {
        let poly = handle(poly)?;
        let spec = OrliczSpec::new(alpha)?;
        let r = orlicz_luxemburg_norm(poly, &spec, &default_quadrature(poly, 0.0)?)?;
        write_out(out, (&r).into())
    })
}

/// Arestov's constant `Λ(p, m)` in Gamma and integral form.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pt_arestov_lambda(p: f64, m: u32, out: *mut PtLambda) -> PtStatus {
    guard(|| {
        let l = arestov_lambda(p, m)?;
        write_out(
            out,
            PtLambda {
                gamma_form: l.value_gamma_form,
                integral_form: l.value_integral_form,
                consistency_gap: l.consistency_gap,
            },
        )
    })
}
