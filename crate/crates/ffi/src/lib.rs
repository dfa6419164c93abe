//! C ABI over `qesf-core`.
//!
//! Models and branch sets are opaque handles created by `qesf_*` functions
//! and released with the matching `_free`. Every fallible call returns a
//! [`QesfStatus`]; on failure [`qesf_last_error`] describes the problem for
//! the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qesf_core::bae::SearchOptions;
use qesf_core::catalog::{self, Params};
use qesf_core::config::ModelConfig;
use qesf_core::model::{classify, ModelSpec, SolvabilityTag};
use qesf_core::pipeline::{run, BranchResult, Model, RunOptions};
use qesf_core::potential::ReferenceShift;
use qesf_core::verify::{certify, VerifyOptions};
use qesf_core::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QesfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidModel = 4,
    UnknownEntry = 5,
    Solver = 6,
    NoBranches = 7,
    Verification = 8,
    OutOfRange = 9,
    BufferTooSmall = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QesfClass {
    ExactlySolvable = 0,
    QesType1 = 1,
    QesType2 = 2,
    QesHigherType = 3,
    QesSingularityInduced = 4,
}

/// Outcome of certifying one branch.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QesfVerification {
    pub residual_max: f64,
    pub residual_rms: f64,
    pub node_count: usize,
    pub normalizable: bool,
    pub pass: bool,
}

/// A model ready to solve.
pub struct QesfModel {
    spec: ModelSpec,
    shift: ReferenceShift,
}

/// Branches found for a model, sorted by energy.
pub struct QesfBranches {
    model: Model,
    results: Vec<BranchResult>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> QesfStatus {
    match e {
        Error::Parse(_) => QesfStatus::Parse,
        Error::UnknownEntry(_) => QesfStatus::UnknownEntry,
        Error::NonConvergence { .. } | Error::SingularJacobian { .. } | Error::Collision(..) => QesfStatus::Solver,
        Error::Grid(_) => QesfStatus::Verification,
        _ => QesfStatus::InvalidModel,
    }
}

fn fail(e: Error) -> QesfStatus {
    set_error(&e.to_string());
    status_of(&e)
}

fn guard(f: impl FnOnce() -> QesfStatus) -> QesfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            QesfStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, QesfStatus> {
    if p.is_null() {
        set_error(&format!("{what} is null"));
        return Err(QesfStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(&format!("{what} is not valid UTF-8"));
        QesfStatus::InvalidUtf8
    })
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

macro_rules! nonnull {
    ($p:expr, $what:literal) => {
        if $p.is_null() {
            set_error(concat!($what, " is null"));
            return QesfStatus::NullPointer;
        }
    };
}

/// Message for the last failed call on this thread, or "" if none.
/// Valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qesf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds a model from a JSON config (same format as the CLI).
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qesf_model_from_json(json: *const c_char, out: *mut *mut QesfModel) -> QesfStatus {
    guard(|| {
        nonnull!(out, "out");
        let text = tri!(str_arg(json, "json"));
        let cfg = tri!(ModelConfig::parse(text).map_err(fail));
        let spec = tri!(cfg.to_spec(None).map_err(fail));
        let shift = tri!(cfg.shift().map_err(fail));
        *out = Box::into_raw(Box::new(QesfModel { spec, shift }));
        QesfStatus::Ok
    })
}

/// Builds a catalog model. `params_json` is a JSON object of parameter
/// overrides and may be null.
///
/// # Safety
/// String arguments must be NUL-terminated (or null where allowed) and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qesf_model_from_catalog(
    name: *const c_char,
    params_json: *const c_char,
    n: usize,
    out: *mut *mut QesfModel,
) -> QesfStatus {
    guard(|| {
        nonnull!(out, "out");
        let name = tri!(str_arg(name, "name"));
        let params: Params = if params_json.is_null() {
            Params::new()
        } else {
            let text = tri!(str_arg(params_json, "params_json"));
            tri!(serde_json::from_str(text).map_err(|e| fail(Error::Parse(format!("params: {e}")))))
        };
        let entry = tri!(catalog::lookup(name).map_err(fail));
        let spec = tri!(entry.instantiate(&params, n).map_err(fail));
        let shift = tri!(entry.shift(&params).map_err(fail));
        *out = Box::into_raw(Box::new(QesfModel { spec, shift }));
        QesfStatus::Ok
    })
}

/// # Safety
/// `model` must come from a `qesf_model_*` constructor or be null.
#[no_mangle]
pub unsafe extern "C" fn qesf_model_free(model: *mut QesfModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `model` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn qesf_model_n(model: *const QesfModel, out: *mut usize) -> QesfStatus {
    guard(|| {
        nonnull!(model, "model");
        nonnull!(out, "out");
        *out = (*model).spec.n;
        QesfStatus::Ok
    })
}

/// # Safety
/// `model` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn qesf_model_classify(model: *const QesfModel, out: *mut QesfClass) -> QesfStatus {
    guard(|| {
        nonnull!(model, "model");
        nonnull!(out, "out");
        let c = tri!(classify(&(*model).spec).map_err(fail));
        *out = match c.tag {
            SolvabilityTag::ExactlySolvable => QesfClass::ExactlySolvable,
            SolvabilityTag::QesType1 => QesfClass::QesType1,
            SolvabilityTag::QesType2 => QesfClass::QesType2,
            SolvabilityTag::QesHigherType => QesfClass::QesHigherType,
            SolvabilityTag::QesSingularityInduced => QesfClass::QesSingularityInduced,
        };
        QesfStatus::Ok
    })
}

/// Enumerates real branches. `seed` is used when `use_seed` is true,
/// otherwise a hash of the model. `attempts = 0` selects the default.
///
/// # Safety
/// `model` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn qesf_solve(
    model: *const QesfModel,
    attempts: usize,
    use_seed: bool,
    seed: u64,
    out: *mut *mut QesfBranches,
) -> QesfStatus {
    guard(|| {
        nonnull!(model, "model");
        nonnull!(out, "out");
        let m = &*model;
        let mut search = SearchOptions::default();
        if attempts > 0 {
            search.attempts = attempts;
        }
        if use_seed {
            search.seed = Some(seed);
        }
        let opts = RunOptions {
            search,
            shift: m.shift,
            verify: None,
        };
        let (model, mut results) = tri!(run(&m.spec, &opts).map_err(fail));
        if results.is_empty() {
            set_error("no real branch found");
            return QesfStatus::NoBranches;
        }
        results.sort_by(|a, b| a.energy.total_cmp(&b.energy));
        *out = Box::into_raw(Box::new(QesfBranches { model, results }));
        QesfStatus::Ok
    })
}

/// # Safety
/// `branches` must come from [`qesf_solve`] or be null.
#[no_mangle]
pub unsafe extern "C" fn qesf_branches_free(branches: *mut QesfBranches) {
    if !branches.is_null() {
        drop(Box::from_raw(branches));
    }
}

/// Number of branches, 0 for a null handle.
///
/// # Safety
/// `branches` must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn qesf_branches_count(branches: *const QesfBranches) -> usize {
    if branches.is_null() {
        0
    } else {
        (*branches).results.len()
    }
}

unsafe fn branch<'a>(branches: *const QesfBranches, i: usize) -> Result<&'a BranchResult, QesfStatus> {
    if branches.is_null() {
        set_error("branches is null");
        return Err(QesfStatus::NullPointer);
    }
    let all = &*branches;
    all.results.get(i).ok_or_else(|| {
        set_error(&format!("branch index {i} out of range"));
        QesfStatus::OutOfRange
    })
}

/// Energy of branch `i`, after the model's reference shift.
///
/// # Safety
/// `branches` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn qesf_branch_energy(branches: *const QesfBranches, i: usize, out: *mut f64) -> QesfStatus {
    guard(|| {
        nonnull!(out, "out");
        *out = tri!(branch(branches, i)).energy;
        QesfStatus::Ok
    })
}

/// Copies the roots of branch `i` into `buf` (capacity `cap`) and stores
/// the root count in `len`. Returns `BufferTooSmall` with `len` set when
/// `cap` is insufficient; `buf` may be null when `cap` is 0.
///
/// # Safety
/// `buf` must hold `cap` doubles; `branches` and `len` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qesf_branch_roots(
    branches: *const QesfBranches,
    i: usize,
    buf: *mut f64,
    cap: usize,
    len: *mut usize,
) -> QesfStatus {
    guard(|| {
        nonnull!(len, "len");
        let b = tri!(branch(branches, i));
        let roots = &b.branch.roots;
        *len = roots.len();
        if cap < roots.len() {
            set_error(&format!("buffer holds {cap} values, {} needed", roots.len()));
            return QesfStatus::BufferTooSmall;
        }
        if !roots.is_empty() {
            nonnull!(buf, "buf");
            ptr::copy_nonoverlapping(roots.as_ptr(), buf, roots.len());
        }
        QesfStatus::Ok
    })
}

/// Max-norm residual of the root equations for branch `i`.
///
/// # Safety
/// `branches` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn qesf_branch_residual(branches: *const QesfBranches, i: usize, out: *mut f64) -> QesfStatus {
    guard(|| {
        nonnull!(out, "out");
        *out = tri!(branch(branches, i)).branch.residual_norm;
        QesfStatus::Ok
    })
}

/// Certifies branch `i` on a grid of `grid_points` points (0 selects the
/// default). A failed certification still returns `Ok` with `pass` false.
///
/// # Safety
/// `branches` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn qesf_branch_verify(
    branches: *const QesfBranches,
    i: usize,
    grid_points: usize,
    out: *mut QesfVerification,
) -> QesfStatus {
    guard(|| {
        nonnull!(out, "out");
        let b = tri!(branch(branches, i));
        let mut opts = VerifyOptions::default();
        if grid_points > 0 {
            opts.grid_points = grid_points;
        }
        let Some(profile) = b.profile.as_ref() else {
            set_error("branch has no potential profile");
            return QesfStatus::Verification;
        };
        let r = tri!(certify(&(*branches).model, profile, &opts).map_err(fail));
        *out = QesfVerification {
            residual_max: r.residual_max,
            residual_rms: r.residual_rms,
            node_count: r.node_count,
            normalizable: r.normalizable,
            pass: r.verdict.pass,
        };
        QesfStatus::Ok
    })
}
