//! C interface to the livehole engine.
//!
//! Programs are opaque handles. Every function returns an [`LhStatus`]; on
//! failure [`lh_last_error`] describes what went wrong on this thread.
//! Strings returned through out-parameters are owned by the caller and must
//! be released with [`lh_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use livehole::dynamics::{EvalError, Outcome};
use livehole::engine::{self, Evaluation, FragmentError, Options, Program, RunError};
use livehole::surface::{print_hole_ctx, print_int, print_ty};
use livehole::syntax::HoleName;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LhStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    /// Parse or type error.
    StaticError = 3,
    Overflow = 4,
    /// The program has not been evaluated yet.
    NotEvaluated = 5,
    UnknownHole = 6,
    /// The fragment does not fit the hole.
    FillRejected = 7,
    /// A bug in the engine.
    Internal = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LhOutcome {
    Boxed = 0,
    Indet = 1,
    FuelExhausted = 2,
}

impl From<Outcome> for LhOutcome {
    fn from(o: Outcome) -> Self {
        match o {
            Outcome::Boxed => LhOutcome::Boxed,
            Outcome::Indet => LhOutcome::Indet,
            Outcome::FuelExhausted => LhOutcome::FuelExhausted,
        }
    }
}

/// Set on [`lh_program_load`] to read free variables as holes.
pub const LH_FREE_VARS_AS_HOLES: u32 = 1;

/// An elaborated program, and its latest evaluation if any.
pub struct LhProgram {
    program: Program,
    options: Options,
    result: Option<Evaluation>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Error(LhStatus, String);

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn guard(f: impl FnOnce() -> Result<(), Error>) -> LhStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LhStatus::Ok,
        Ok(Err(Error(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside the engine".into());
            LhStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(s: *const c_char, what: &str) -> Result<&'a str, Error> {
    if s.is_null() {
        return Err(Error(LhStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(s).to_str().map_err(|e| Error(LhStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn handle<'a>(p: *mut LhProgram) -> Result<&'a mut LhProgram, Error> {
    p.as_mut().ok_or_else(|| Error(LhStatus::NullArgument, "program is null".into()))
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Error> {
    if out.is_null() {
        return Err(Error(LhStatus::NullArgument, "output pointer is null".into()));
    }
    let s = CString::new(s).map_err(|e| Error(LhStatus::Internal, e.to_string()))?;
    *out = s.into_raw();
    Ok(())
}

fn run_error(e: RunError) -> Error {
    match e {
        RunError::Eval(EvalError::Overflow(_)) => Error(LhStatus::Overflow, e.to_string()),
        e => Error(LhStatus::Internal, e.to_string()),
    }
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn lh_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lh_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse and elaborate `source`. Diagnostics end up in [`lh_last_error`].
///
/// # Safety
/// `source` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lh_program_load(source: *const c_char, flags: u32, out: *mut *mut LhProgram) -> LhStatus {
    guard(|| {
        let src = str_arg(source, "source")?;
        if out.is_null() {
            return Err(Error(LhStatus::NullArgument, "output pointer is null".into()));
        }
        let options = Options { free_vars_as_holes: flags & LH_FREE_VARS_AS_HOLES != 0 };
        let program = engine::load(src, &options).map_err(|diags| {
            let text: Vec<_> = diags.iter().map(|d| d.to_string()).collect();
            Error(LhStatus::StaticError, text.join("\n"))
        })?;
        *out = Box::into_raw(Box::new(LhProgram { program, options, result: None }));
        Ok(())
    })
}

/// # Safety
/// `p` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lh_program_free(p: *mut LhProgram) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// The program's type.
///
/// # Safety
/// `p` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lh_program_type(p: *mut LhProgram, out: *mut *mut c_char) -> LhStatus {
    guard(|| {
        let p = handle(p)?;
        put_string(out, print_ty(&p.program.elab.ty))
    })
}

/// The elaborated program, then one line per hole.
///
/// # Safety
/// `p` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lh_program_elaborated(p: *mut LhProgram, out: *mut *mut c_char) -> LhStatus {
    guard(|| {
        let p = handle(p)?;
        let e = &p.program.elab;
        put_string(out, format!("{}\n{}", print_int(&e.expr), print_hole_ctx(&e.holes)))
    })
}

/// Source text of the program (after any fills).
///
/// # Safety
/// `p` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lh_program_source(p: *mut LhProgram, out: *mut *mut c_char) -> LhStatus {
    guard(|| {
        let p = handle(p)?;
        put_string(out, p.program.source.clone())
    })
}

/// Evaluate with at most `fuel` steps and keep the result on the handle.
/// Any out-pointer may be null.
///
/// # Safety
/// `p` must be a live handle; non-null out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn lh_program_eval(
    p: *mut LhProgram,
    fuel: u64,
    result: *mut *mut c_char,
    outcome: *mut LhOutcome,
    steps: *mut u64,
) -> LhStatus {
    guard(|| {
        let p = handle(p)?;
        let fuel = usize::try_from(fuel).unwrap_or(usize::MAX);
        let ev = engine::evaluate(&p.program.elab, fuel).map_err(run_error)?;
        write_result(&ev, result, outcome, steps)?;
        p.result = Some(ev);
        Ok(())
    })
}

unsafe fn write_result(
    ev: &Evaluation,
    result: *mut *mut c_char,
    outcome: *mut LhOutcome,
    steps: *mut u64,
) -> Result<(), Error> {
    if !result.is_null() {
        put_string(result, print_int(&ev.run.expr))?;
    }
    if !outcome.is_null() {
        *outcome = ev.run.outcome.into();
    }
    if !steps.is_null() {
        *steps = ev.run.steps as u64;
    }
    Ok(())
}

/// Number of closures of `hole` in the latest result.
///
/// # Safety
/// `p` must be a live handle, `hole` a NUL-terminated string and `count` a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lh_program_closure_count(p: *mut LhProgram, hole: *const c_char, count: *mut u64) -> LhStatus {
    guard(|| {
        let p = handle(p)?;
        let hole = HoleName::new(str_arg(hole, "hole")?);
        let ev =
            p.result.as_ref().ok_or_else(|| Error(LhStatus::NotEvaluated, "program has not been evaluated".into()))?;
        if count.is_null() {
            return Err(Error(LhStatus::NullArgument, "count is null".into()));
        }
        *count = ev.index.by_hole(&hole).len() as u64;
        Ok(())
    })
}

/// Fill `hole` in the evaluated result with `fragment` and resume for at
/// most `fuel` steps. The filled program is a new handle; `p` is unchanged.
///
/// # Safety
/// `p` must be a live handle, strings NUL-terminated, `out` valid, and other
/// out-pointers null or valid.
#[no_mangle]
pub unsafe extern "C" fn lh_program_fill(
    p: *mut LhProgram,
    hole: *const c_char,
    fragment: *const c_char,
    fuel: u64,
    out: *mut *mut LhProgram,
    result: *mut *mut c_char,
    outcome: *mut LhOutcome,
    steps: *mut u64,
) -> LhStatus {
    guard(|| {
        let p = handle(p)?;
        let hole = HoleName::new(str_arg(hole, "hole")?);
        let fragment = str_arg(fragment, "fragment")?;
        if out.is_null() {
            return Err(Error(LhStatus::NullArgument, "output pointer is null".into()));
        }
        let state = &p
            .result
            .as_ref()
            .ok_or_else(|| Error(LhStatus::NotEvaluated, "program has not been evaluated".into()))?
            .run
            .expr;
        let fuel = usize::try_from(fuel).unwrap_or(usize::MAX);
        let filled =
            engine::fill_fragment(&p.program, state, &hole, fragment, fuel, &p.options).map_err(|e| match e {
                FragmentError::UnknownHole(_) => Error(LhStatus::UnknownHole, e.to_string()),
                FragmentError::Rejected { .. } => Error(LhStatus::FillRejected, e.to_string()),
                FragmentError::Run(e) => run_error(e),
            })?;
        write_result(&filled.evaluation, result, outcome, steps)?;
        *out = Box::into_raw(Box::new(LhProgram {
            program: filled.program,
            options: p.options.clone(),
            result: Some(filled.evaluation),
        }));
        Ok(())
    })
}
