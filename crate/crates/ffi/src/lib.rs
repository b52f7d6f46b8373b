//! C ABI for qdesign.
//!
//! Every fallible function returns a [`QdStatus`]; on failure the message is
//! available from [`qd_last_error_message`] on the same thread. Handles are
//! opaque and must be released with the matching `*_free` function. Strings
//! returned by the library are released with [`qd_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::time::Duration;

use qdesign::design::{borel_family_selection, lambda_max, q1_family, verify_design, verify_set_design};
use qdesign::exchange::{DesignFile, GroupDescriptor, KmFile, LoadedDesign, SolveResponseJson};
use qdesign::incidence::borel_km_concat;
use qdesign::{km_concat, qbinom, qbinom_u64, solve, DesignParams, Error, FieldSpec, GroupKind, KmMatrix, MatrixGroup};
use qdesign::{ModulusOverrides, SolveOutcome, SolveRequest, SolveStatus};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QdStatus {
    Ok = 0,
    InvalidArgument = 1,
    NullPointer = 2,
    GuardExceeded = 3,
    Timeout = 4,
    Overflow = 5,
    OutOfRange = 6,
    Panic = 7,
}

/// A finite field GF(q).
pub struct QdField {
    inner: FieldSpec,
}

/// A design: orbit representatives under a group, or a set design.
pub struct QdDesign {
    file: DesignFile,
}

/// A Kramer-Mesner matrix together with its group.
pub struct QdKm {
    matrix: KmMatrix,
    group: MatrixGroup,
}

/// Result of a solver run.
pub struct QdSolutions {
    response: SolveResponseJson,
    outcome: SolveOutcome,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Fail(QdStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::GuardExceeded { .. } => QdStatus::GuardExceeded,
            _ => QdStatus::InvalidArgument,
        };
        Fail(status, e.to_string())
    }
}

fn fail(status: QdStatus, msg: impl Into<String>) -> Fail {
    Fail(status, msg.into())
}

fn guarded(f: impl FnOnce() -> Result<(), Fail>) -> QdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QdStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            QdStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| fail(QdStatus::NullPointer, format!("{what} is null")))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| fail(QdStatus::NullPointer, format!("{what} is null")))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(fail(QdStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(QdStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(QdStatus::NullPointer, format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn into_c_string(s: String) -> Result<*mut c_char, Fail> {
    CString::new(s).map(CString::into_raw).map_err(|_| fail(QdStatus::InvalidArgument, "string contains NUL"))
}

fn json_err(e: serde_json::Error) -> Fail {
    fail(QdStatus::InvalidArgument, e.to_string())
}

/// Message for the most recent failure on this thread, or NULL. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `[n choose k]_q` into `*result`; `Overflow` when it exceeds 64 bits.
///
/// # Safety
/// `result` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qd_qbinom_u64(n: u32, k: u32, q: u64, result: *mut u64) -> QdStatus {
    guarded(|| {
        let result = out(result, "result")?;
        if q == 0 {
            return Err(fail(QdStatus::InvalidArgument, "q must be positive"));
        }
        *result =
            qbinom_u64(n as usize, k as usize, q).ok_or_else(|| fail(QdStatus::Overflow, "value exceeds 64 bits"))?;
        Ok(())
    })
}

/// `[n choose k]_q` in decimal, newly allocated.
///
/// # Safety
/// `result` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qd_qbinom_string(n: u32, k: u32, q: u64, result: *mut *mut c_char) -> QdStatus {
    guarded(|| {
        let result = out(result, "result")?;
        if q == 0 {
            return Err(fail(QdStatus::InvalidArgument, "q must be positive"));
        }
        *result = into_c_string(qbinom(i64::from(n), i64::from(k), q).to_string())?;
        Ok(())
    })
}

/// Block count of the complete design on dimensions `ks[0..ks_len]`.
///
/// # Safety
/// `ks` must point to `ks_len` values; `result` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qd_lambda_max_u64(
    n: u32,
    t: u32,
    ks: *const u32,
    ks_len: usize,
    q: u64,
    result: *mut u64,
) -> QdStatus {
    guarded(|| {
        let result = out(result, "result")?;
        let ks: Vec<usize> = slice_arg(ks, ks_len, "ks")?.iter().map(|&k| k as usize).collect();
        if q == 0 || ks.is_empty() || ks.iter().any(|&k| k < t as usize || k > n as usize) {
            return Err(fail(QdStatus::InvalidArgument, "need q >= 1 and t <= k <= n"));
        }
        let v = lambda_max(n as usize, &ks, t as usize, q);
        *result = u64::try_from(v).map_err(|_| fail(QdStatus::Overflow, "value exceeds 64 bits"))?;
        Ok(())
    })
}

/// GF(q) with the default modulus.
///
/// # Safety
/// `field` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qd_field_new(q: u32, field: *mut *mut QdField) -> QdStatus {
    guarded(|| {
        let field = out(field, "field")?;
        *field = Box::into_raw(Box::new(QdField { inner: FieldSpec::new(q, None)? }));
        Ok(())
    })
}

/// # Safety
/// `field` must be NULL or a handle from [`qd_field_new`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qd_field_free(field: *mut QdField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// # Safety
/// `field` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn qd_field_order(field: *const QdField) -> u32 {
    field.as_ref().map_or(0, |f| f.inner.order())
}

unsafe fn field_op(
    field: *const QdField,
    a: u32,
    b: u32,
    result: *mut u32,
    op: fn(&FieldSpec, u8, u8) -> Result<u8, Error>,
) -> QdStatus {
    guarded(|| {
        let f = &deref(field, "field")?.inner;
        let result = out(result, "result")?;
        *result = u32::from(op(f, f.element(a)?, f.element(b)?)?);
        Ok(())
    })
}

/// # Safety
/// `field` must be a live handle; `result` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qd_field_add(field: *const QdField, a: u32, b: u32, result: *mut u32) -> QdStatus {
    field_op(field, a, b, result, |f, a, b| Ok(f.add(a, b)))
}

/// # Safety
/// `field` must be a live handle; `result` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qd_field_mul(field: *const QdField, a: u32, b: u32, result: *mut u32) -> QdStatus {
    field_op(field, a, b, result, |f, a, b| Ok(f.mul(a, b)))
}

/// # Safety
/// `field` must be a live handle; `result` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qd_field_inv(field: *const QdField, a: u32, result: *mut u32) -> QdStatus {
    field_op(field, a, 0, result, |f, a, _| f.inv(a))
}

/// The Borel family design in dimension `t + 4`; `q = 1` gives the set version.
///
/// # Safety
/// `design` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qd_design_family(t: u32, q: u32, design: *mut *mut QdDesign) -> QdStatus {
    guarded(|| {
        let design = out(design, "design")?;
        let t = t as usize;
        let file = if q == 1 {
            let (d, lambda) = q1_family(t)?;
            let params = DesignParams { t, n: d.n, ks: vec![t + 1, t + 2], lambda, q: 1 };
            DesignFile::from_set_design(&d, &params)
        } else {
            let field = FieldSpec::new(q, None)?;
            let (sel, params) = borel_family_selection(t, &field)?;
            DesignFile::from_selection(&sel, &params)
        };
        *design = Box::into_raw(Box::new(QdDesign { file }));
        Ok(())
    })
}

/// Parses a design file.
///
/// # Safety
/// `json` must be a NUL-terminated string; `design` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qd_design_from_json(json: *const c_char, design: *mut *mut QdDesign) -> QdStatus {
    guarded(|| {
        let text = str_arg(json, "json")?;
        let design = out(design, "design")?;
        let file: DesignFile = serde_json::from_str(text).map_err(json_err)?;
        *design = Box::into_raw(Box::new(QdDesign { file }));
        Ok(())
    })
}

/// # Safety
/// `design` must be a live handle; `json` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qd_design_to_json(design: *const QdDesign, json: *mut *mut c_char) -> QdStatus {
    guarded(|| {
        let d = deref(design, "design")?;
        let json = out(json, "json")?;
        *json = into_c_string(serde_json::to_string_pretty(&d.file).map_err(json_err)?)?;
        Ok(())
    })
}

/// Declared lambda of the design.
///
/// # Safety
/// `design` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn qd_design_lambda(design: *const QdDesign) -> u64 {
    design.as_ref().map_or(0, |d| d.file.params.lambda)
}

/// Expands the design and counts, for every t-subspace (or t-subset), the
/// blocks containing it. `t = 0` uses the design's own t. On success
/// `*balanced` says whether all counts agree and `*lambda` holds the common
/// count, or the most frequent one otherwise.
///
/// # Safety
/// `design` must be a live handle; `balanced` and `lambda` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qd_design_verify(
    design: *const QdDesign,
    t: u32,
    guard: u64,
    balanced: *mut bool,
    lambda: *mut u64,
) -> QdStatus {
    guarded(|| {
        let d = deref(design, "design")?;
        let balanced = out(balanced, "balanced")?;
        let lambda = out(lambda, "lambda")?;
        let t = if t == 0 { d.file.params.t } else { t as usize };
        let (ok, l) = match d.file.load(&ModulusOverrides::default(), guard)? {
            LoadedDesign::Subspaces(b) => summary(verify_design(&b, t, guard)?),
            LoadedDesign::Sets(s) => summary(verify_set_design(&s, t)?),
        };
        *balanced = ok;
        *lambda = l;
        Ok(())
    })
}

fn summary<T>(v: qdesign::Verification<T>) -> (bool, u64) {
    match v {
        qdesign::Verification::Balanced { lambda } => (true, lambda),
        qdesign::Verification::Unbalanced { expected, .. } => (false, expected),
    }
}

/// # Safety
/// `design` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qd_design_free(design: *mut QdDesign) {
    if !design.is_null() {
        drop(Box::from_raw(design));
    }
}

/// `A_{t,K}^G` for `group` in `borel`, `singer`, `singer_frobenius`,
/// `trivial`, or a JSON group descriptor.
///
/// # Safety
/// `group` must be a NUL-terminated string, `ks` must point to `ks_len`
/// values and `km` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qd_km_new(
    group: *const c_char,
    n: u32,
    q: u32,
    t: u32,
    ks: *const u32,
    ks_len: usize,
    guard: u64,
    km: *mut *mut QdKm,
) -> QdStatus {
    guarded(|| {
        let group = str_arg(group, "group")?;
        let ks: Vec<usize> = slice_arg(ks, ks_len, "ks")?.iter().map(|&k| k as usize).collect();
        let km = out(km, "km")?;
        let desc = if group.trim_start().starts_with('{') {
            serde_json::from_str(group).map_err(json_err)?
        } else {
            GroupDescriptor::of_kind(group)
        };
        let field = FieldSpec::new(q, None)?;
        let (n, t) = (n as usize, t as usize);
        let g = desc.build(&field, n)?;
        let matrix = if g.kind() == GroupKind::Borel {
            for &k in &ks {
                qdesign::enumerate::guard_count(
                    "the set of k-subspaces",
                    &qbinom(n as i64, k as i64, u64::from(q)),
                    guard,
                )?;
            }
            borel_km_concat(&field, n, t, &ks)?
        } else {
            km_concat(&g, t, &ks, guard)?
        };
        *km = Box::into_raw(Box::new(QdKm { matrix, group: g }));
        Ok(())
    })
}

/// # Safety
/// `km` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn qd_km_rows(km: *const QdKm) -> usize {
    km.as_ref().map_or(0, |m| m.matrix.num_rows())
}

/// # Safety
/// `km` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn qd_km_cols(km: *const QdKm) -> usize {
    km.as_ref().map_or(0, |m| m.matrix.num_cols())
}

/// Entry at 0-based `(row, col)`.
///
/// # Safety
/// `km` must be a live handle; `result` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qd_km_entry(km: *const QdKm, row: usize, col: usize, result: *mut u64) -> QdStatus {
    guarded(|| {
        let m = &deref(km, "km")?.matrix;
        let result = out(result, "result")?;
        if row >= m.num_rows() || col >= m.num_cols() {
            return Err(fail(
                QdStatus::OutOfRange,
                format!("({row}, {col}) outside {}x{}", m.num_rows(), m.num_cols()),
            ));
        }
        *result = m.entry(row, col);
        Ok(())
    })
}

/// The matrix in the JSON exchange format.
///
/// # Safety
/// `km` must be a live handle; `json` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qd_km_to_json(km: *const QdKm, json: *mut *mut c_char) -> QdStatus {
    guarded(|| {
        let m = deref(km, "km")?;
        let json = out(json, "json")?;
        let file = KmFile::new(&m.matrix, &m.group);
        *json = into_c_string(serde_json::to_string_pretty(&file).map_err(json_err)?)?;
        Ok(())
    })
}

/// # Safety
/// `km` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qd_km_free(km: *mut QdKm) {
    if !km.is_null() {
        drop(Box::from_raw(km));
    }
}

/// Solves `A x = lambda 1` over 0/1 vectors. `time_limit_secs <= 0` means
/// no limit. Returns `Timeout` with the partial result still stored in
/// `*solutions` when the limit runs out.
///
/// # Safety
/// `km` must be a live handle; `solutions` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qd_km_solve(
    km: *const QdKm,
    lambda: u64,
    max_solutions: usize,
    time_limit_secs: f64,
    solutions: *mut *mut QdSolutions,
) -> QdStatus {
    let mut timed_out = false;
    let status = guarded(|| {
        let m = deref(km, "km")?;
        let solutions = out(solutions, "solutions")?;
        let time_limit = (time_limit_secs > 0.0)
            .then(|| Duration::try_from_secs_f64(time_limit_secs))
            .transpose()
            .map_err(|e| fail(QdStatus::InvalidArgument, e.to_string()))?;
        let req = SolveRequest { matrix: (&m.matrix).into(), lambda, max_solutions, time_limit };
        let outcome = solve(&req)?;
        timed_out = outcome.status == SolveStatus::Timeout;
        let response = SolveResponseJson::new(&m.matrix, &m.group, lambda, max_solutions, &outcome);
        *solutions = Box::into_raw(Box::new(QdSolutions { response, outcome }));
        Ok(())
    });
    if status == QdStatus::Ok && timed_out {
        set_error("time limit reached".into());
        return QdStatus::Timeout;
    }
    status
}

/// # Safety
/// `solutions` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn qd_solutions_count(solutions: *const QdSolutions) -> usize {
    solutions.as_ref().map_or(0, |s| s.outcome.solutions.len())
}

/// Whether the search finished (as opposed to stopping at the cap or the
/// time limit).
///
/// # Safety
/// `solutions` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn qd_solutions_complete(solutions: *const QdSolutions) -> bool {
    solutions.as_ref().is_some_and(|s| s.outcome.status == SolveStatus::Complete)
}

/// Copies the selected column indices of solution `index` into
/// `buf[0..cap]` and stores their number in `*len`. With `cap` too small
/// only `*len` is written and `OutOfRange` is returned.
///
/// # Safety
/// `solutions` must be a live handle, `buf` must hold `cap` values and
/// `len` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qd_solutions_columns(
    solutions: *const QdSolutions,
    index: usize,
    buf: *mut usize,
    cap: usize,
    len: *mut usize,
) -> QdStatus {
    guarded(|| {
        let s = deref(solutions, "solutions")?;
        let len = out(len, "len")?;
        let sol = s
            .response
            .solutions
            .get(index)
            .ok_or_else(|| fail(QdStatus::OutOfRange, format!("no solution {index}")))?;
        *len = sol.columns.len();
        if cap < sol.columns.len() {
            return Err(fail(QdStatus::OutOfRange, format!("buffer holds {cap}, need {}", sol.columns.len())));
        }
        if !sol.columns.is_empty() {
            if buf.is_null() {
                return Err(fail(QdStatus::NullPointer, "buf is null"));
            }
            ptr::copy_nonoverlapping(sol.columns.as_ptr(), buf, sol.columns.len());
        }
        Ok(())
    })
}

/// The design selected by solution `index`.
///
/// # Safety
/// `solutions` must be a live handle; `design` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qd_solutions_design(
    solutions: *const QdSolutions,
    index: usize,
    design: *mut *mut QdDesign,
) -> QdStatus {
    guarded(|| {
        let s = deref(solutions, "solutions")?;
        let design = out(design, "design")?;
        let sol = s
            .response
            .solutions
            .get(index)
            .ok_or_else(|| fail(QdStatus::OutOfRange, format!("no solution {index}")))?;
        *design = Box::into_raw(Box::new(QdDesign { file: sol.design.clone() }));
        Ok(())
    })
}

/// The solver response as JSON.
///
/// # Safety
/// `solutions` must be a live handle; `json` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qd_solutions_to_json(solutions: *const QdSolutions, json: *mut *mut c_char) -> QdStatus {
    guarded(|| {
        let s = deref(solutions, "solutions")?;
        let json = out(json, "json")?;
        *json = into_c_string(serde_json::to_string_pretty(&s.response).map_err(json_err)?)?;
        Ok(())
    })
}

/// # Safety
/// `solutions` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qd_solutions_free(solutions: *mut QdSolutions) {
    if !solutions.is_null() {
        drop(Box::from_raw(solutions));
    }
}
