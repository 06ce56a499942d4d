//! C ABI for `isogroup`.
//!
//! Groups and balls are opaque handles created and destroyed through this
//! interface. Every fallible call returns an [`IsogroupStatus`]; on failure a
//! message for the calling thread is available from [`isogroup_last_error`].
//! Matrices cross the boundary as row-major `double` arrays.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use isogroup::groupgen::{enumerate_ball, lattice_basis, translation_subgroup, EnumerateOptions, GroupBall, GroupSpec};
use isogroup::growth::{estimate_dimension, growth_profile, CountKind};
use isogroup::isomcore::Isometry;
use isogroup::obstruct::{self, Config, Verdict};
use isogroup::Error;

/// Result codes of the C interface.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsogroupStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    NotOrthogonal = 4,
    NonDiscrete = 5,
    ParseError = 6,
    Precondition = 7,
    Io = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsogroupVerdict {
    InfiniteMultiplicityThm12 = 0,
    InfiniteMultiplicityThm13 = 1,
    Unknown = 2,
    NoObstructionClaimed = 3,
    InvalidInput = 4,
}

impl From<Verdict> for IsogroupVerdict {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::InfiniteMultiplicityThm12 => IsogroupVerdict::InfiniteMultiplicityThm12,
            Verdict::InfiniteMultiplicityThm13 => IsogroupVerdict::InfiniteMultiplicityThm13,
            Verdict::Unknown => IsogroupVerdict::Unknown,
            Verdict::NoObstructionClaimed => IsogroupVerdict::NoObstructionClaimed,
            Verdict::InvalidInput => IsogroupVerdict::InvalidInput,
        }
    }
}

/// Finitely generated subgroup of `E(n)`.
pub struct IsogroupGroup {
    spec: GroupSpec,
    tol: f64,
}

/// Enumerated ball of a group.
pub struct IsogroupBall {
    ball: GroupBall,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> IsogroupStatus {
    match e {
        Error::DimensionMismatch { .. } => IsogroupStatus::DimensionMismatch,
        Error::NotOrthogonal { .. } | Error::InvalidConformal(_) => IsogroupStatus::NotOrthogonal,
        Error::NonDiscrete { .. } => IsogroupStatus::NonDiscrete,
        Error::Json(_) | Error::Config(_) => IsogroupStatus::ParseError,
        Error::Precondition(_) | Error::NonCommuting(..) | Error::MembershipViolation => IsogroupStatus::Precondition,
        Error::Io(_) | Error::Csv(_) => IsogroupStatus::Io,
        _ => IsogroupStatus::InvalidArgument,
    }
}

enum Failure {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> IsogroupStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => IsogroupStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("null pointer: {what}"));
            IsogroupStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_last_error("internal panic".into());
            IsogroupStatus::Panic
        }
    }
}

fn non_null<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    // SAFETY: callers pass either null or a pointer obtained from this library.
    unsafe { p.as_ref() }.ok_or(Failure::Null(what))
}

fn out_ptr<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    // SAFETY: callers pass either null or a valid, writable location.
    unsafe { p.as_mut() }.ok_or(Failure::Null(what))
}

fn slice<'a>(p: *const f64, len: usize, what: &'static str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    // SAFETY: the caller guarantees `len` readable doubles at `p`.
    Ok(unsafe { std::slice::from_raw_parts(p, len) })
}

fn slice_mut<'a>(p: *mut f64, len: usize, what: &'static str) -> Result<&'a mut [f64], Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    // SAFETY: the caller guarantees `len` writable doubles at `p`.
    Ok(unsafe { std::slice::from_raw_parts_mut(p, len) })
}

fn c_str<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    // SAFETY: the caller guarantees a NUL-terminated string.
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|_| Failure::Lib(Error::InvalidArgument(format!("{what} is not valid UTF-8"))))
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn isogroup_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn isogroup_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a group from `count` generators in dimension `dim`.
///
/// `orts` holds `count · dim · dim` doubles (each matrix row-major) and
/// `trans` holds `count · dim` doubles. Orthogonality is checked at `tol`.
///
/// # Safety
/// The arrays must be readable for the stated lengths and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn isogroup_group_new(
    dim: usize,
    count: usize,
    orts: *const f64,
    trans: *const f64,
    tol: f64,
    out: *mut *mut IsogroupGroup,
) -> IsogroupStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        if dim == 0 || count == 0 {
            return Err(Error::InvalidArgument("dim and count must be positive".into()).into());
        }
        let orts = slice(orts, count * dim * dim, "orts")?;
        let trans = slice(trans, count * dim, "trans")?;
        let mut gens = Vec::with_capacity(count);
        for i in 0..count {
            let rows: Vec<Vec<f64>> = orts[i * dim * dim..(i + 1) * dim * dim]
                .chunks(dim)
                .map(<[f64]>::to_vec)
                .collect();
            gens.push(Isometry::from_rows(&rows, &trans[i * dim..(i + 1) * dim], tol)?);
        }
        let spec = GroupSpec::new(gens)?;
        *out = Box::into_raw(Box::new(IsogroupGroup { spec, tol }));
        Ok(())
    })
}

/// # Safety
/// `group` must come from [`isogroup_group_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn isogroup_group_free(group: *mut IsogroupGroup) {
    if !group.is_null() {
        drop(Box::from_raw(group));
    }
}

/// Ambient dimension, or 0 for a null handle.
///
/// # Safety
/// `group` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn isogroup_group_dim(group: *const IsogroupGroup) -> usize {
    group.as_ref().map_or(0, |g| g.spec.dim())
}

/// Enumerates the elements with translation norm at most `radius`.
///
/// # Safety
/// `group` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn isogroup_ball_enumerate(
    group: *const IsogroupGroup,
    radius: f64,
    out: *mut *mut IsogroupBall,
) -> IsogroupStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let g = non_null(group, "group")?;
        let ball = enumerate_ball(&g.spec, radius, &EnumerateOptions::default().with_tol(g.tol))?;
        *out = Box::into_raw(Box::new(IsogroupBall { ball }));
        Ok(())
    })
}

/// # Safety
/// `ball` must come from [`isogroup_ball_enumerate`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn isogroup_ball_free(ball: *mut IsogroupBall) {
    if !ball.is_null() {
        drop(Box::from_raw(ball));
    }
}

/// Number of elements, or 0 for a null handle.
///
/// # Safety
/// `ball` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn isogroup_ball_len(ball: *const IsogroupBall) -> usize {
    ball.as_ref().map_or(0, |b| b.ball.len())
}

/// Whether enumeration finished below its word and element limits.
///
/// # Safety
/// `ball` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn isogroup_ball_is_complete(ball: *const IsogroupBall) -> bool {
    ball.as_ref().is_some_and(|b| b.ball.is_complete())
}

/// Number of elements with translation norm at most `r`.
///
/// # Safety
/// `ball` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn isogroup_ball_count_within(
    ball: *const IsogroupBall,
    r: f64,
    out: *mut usize,
) -> IsogroupStatus {
    guard(|| {
        let b = non_null(ball, "ball")?;
        let out = out_ptr(out, "out")?;
        if r > b.ball.radius() + b.ball.tol() {
            return Err(Error::RadiusTooLarge {
                requested: r,
                available: b.ball.radius(),
            }
            .into());
        }
        *out = b.ball.count_within(r);
        Ok(())
    })
}

/// Copies element `index` into `ort_out` (`dim · dim`, row-major) and
/// `tran_out` (`dim`).
///
/// # Safety
/// `ball` must be a live handle and the output arrays writable for the
/// stated lengths.
#[no_mangle]
pub unsafe extern "C" fn isogroup_ball_element(
    ball: *const IsogroupBall,
    index: usize,
    ort_out: *mut f64,
    tran_out: *mut f64,
) -> IsogroupStatus {
    guard(|| {
        let b = non_null(ball, "ball")?;
        let g = b
            .ball
            .elements()
            .get(index)
            .ok_or_else(|| Error::InvalidArgument(format!("index {index} out of range")))?;
        let n = g.dim();
        let ort = slice_mut(ort_out, n * n, "ort_out")?;
        let tran = slice_mut(tran_out, n, "tran_out")?;
        for i in 0..n {
            for j in 0..n {
                ort[i * n + j] = g.ort()[(i, j)];
            }
            tran[i] = g.tran()[i];
        }
        Ok(())
    })
}

/// Rank of the lattice of pure translations found in the ball.
///
/// # Safety
/// `ball` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn isogroup_ball_translation_rank(ball: *const IsogroupBall, out: *mut usize) -> IsogroupStatus {
    guard(|| {
        let b = non_null(ball, "ball")?;
        let out = out_ptr(out, "out")?;
        *out = lattice_basis(&translation_subgroup(&b.ball))?.rank();
        Ok(())
    })
}

/// Growth dimension from a log-log fit of `N(r)` over `count` radii.
///
/// # Safety
/// `radii` must hold `count` doubles; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn isogroup_estimate_dimension(
    group: *const IsogroupGroup,
    radii: *const f64,
    count: usize,
    k_hat_out: *mut usize,
    slope_out: *mut f64,
    residual_out: *mut f64,
) -> IsogroupStatus {
    guard(|| {
        let g = non_null(group, "group")?;
        let radii = slice(radii, count, "radii")?;
        let k_out = out_ptr(k_hat_out, "k_hat_out")?;
        let s_out = out_ptr(slope_out, "slope_out")?;
        let r_out = out_ptr(residual_out, "residual_out")?;
        let r = radii.iter().copied().fold(0.0, f64::max);
        let ball = enumerate_ball(&g.spec, r, &EnumerateOptions::default().with_tol(g.tol))?;
        let est = estimate_dimension(&growth_profile(&ball, radii, None)?, CountKind::N)?;
        *k_out = est.k_hat;
        *s_out = est.slope;
        *r_out = est.residual;
        Ok(())
    })
}

/// Classifies `(n, dim Γ, dim Γ_T)`; never fails.
#[no_mangle]
pub extern "C" fn isogroup_classify(n: i64, k: i64, l: i64) -> IsogroupVerdict {
    obstruct::classify(n, k, l).verdict.into()
}

/// Condition `l / k > 1 / (n − k)` in exact integer arithmetic.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn isogroup_condition_11(n: i64, k: i64, l: i64, out: *mut bool) -> IsogroupStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = obstruct::condition_11(n, k, l)?;
        Ok(())
    })
}

/// Exponent form of the same condition, `n − k − n(n−k−1)/(n−l−1) < 0`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn isogroup_exponent_condition(n: i64, k: i64, l: i64, out: *mut bool) -> IsogroupStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = obstruct::exponent_condition(n, k, l)?;
        Ok(())
    })
}

/// Runs the analysis pipeline on a JSON configuration held in memory. On
/// success `report_out` receives the JSON report (release it with
/// [`isogroup_string_free`]) and `exit_code_out` the command-line exit code.
///
/// # Safety
/// `config_json` must be a NUL-terminated string; the outputs must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn isogroup_analyze_json(
    config_json: *const c_char,
    report_out: *mut *mut c_char,
    exit_code_out: *mut i32,
) -> IsogroupStatus {
    guard(|| {
        let report_out = out_ptr(report_out, "report_out")?;
        *report_out = ptr::null_mut();
        let code_out = out_ptr(exit_code_out, "exit_code_out")?;
        let text = c_str(config_json, "config_json")?;
        let problem = Config::from_json(text)?.validate()?;
        let report = obstruct::analyze(&problem)?;
        let json = serde_json::to_string(&report).map_err(Error::from)?;
        *code_out = report.exit_code();
        *report_out = CString::new(json)
            .map_err(|_| Error::InvalidArgument("report contains NUL".into()))?
            .into_raw();
        Ok(())
    })
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn isogroup_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
