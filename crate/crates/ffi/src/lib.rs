//! C ABI over the `psl` crate.
//!
//! Formulas are passed around as opaque `PslFormula` handles created by
//! `psl_formula_parse` or a sampler and released with `psl_formula_free`.
//! Every fallible function returns a `PslStatus`; on failure the message is
//! available from `psl_last_error` on the calling thread. Strings returned
//! through out-parameters are owned by the caller and released with
//! `psl_string_free`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::cmp::Ordering;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use psl::{Assignment, Error, Formula, Provenance, RngStream, Statistic, Test};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PslStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Out-of-range parameters or malformed input.
    Input = 2,
    /// DIMACS text could not be parsed.
    Parse = 3,
    /// A component exceeded the exact-search budget.
    Budget = 4,
    /// Rejection sampling ran out of attempts.
    Exhausted = 5,
    /// A string argument was not valid UTF-8.
    Utf8 = 6,
    /// The library panicked; the handle arguments should be considered lost.
    Panic = 7,
}

/// Which test `psl_detect` runs.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PslTest {
    Sat = 0,
    Lr = 1,
    Coupling = 2,
}

/// Outcome of `psl_detect`.
///
/// `t`, `p` and `d` are filled for the coupling test only. `cmp` is the sign
/// of `Z − E[Z]` for the likelihood-ratio test and 0 otherwise.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PslTestResult {
    pub decision: bool,
    pub feasible: bool,
    pub t: u64,
    pub p: u64,
    pub d: u64,
    pub cmp: i32,
}

/// Opaque formula handle.
pub struct PslFormula {
    formula: Formula,
    provenance: Option<Provenance>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> PslStatus {
    match e {
        Error::Input(_) | Error::Io(_) => PslStatus::Input,
        Error::Parse { .. } => PslStatus::Parse,
        Error::Budget { .. } | Error::AllInfeasible { .. } => PslStatus::Budget,
        Error::Exhausted { .. } => PslStatus::Exhausted,
    }
}

struct Fail(PslStatus);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        set_error(e.to_string());
        Fail(status_of(&e))
    }
}

fn null(what: &str) -> Fail {
    set_error(format!("{what} is null"));
    Fail(PslStatus::NullPointer)
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> PslStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PslStatus::Ok,
        Ok(Err(Fail(s))) => s,
        Err(_) => {
            set_error("panic inside psl");
            PslStatus::Panic
        }
    }
}

unsafe fn formula_ref<'a>(f: *const PslFormula) -> Result<&'a PslFormula, Fail> {
    f.as_ref().ok_or_else(|| null("formula"))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).expect("no interior nul").into_raw()
}

fn to_usize(x: u64) -> Result<usize, Fail> {
    usize::try_from(x).map_err(|_| Fail::from(Error::Input(format!("{x} does not fit in size_t"))))
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread; do not free.
#[no_mangle]
pub extern "C" fn psl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn psl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses nul-terminated DIMACS text into a new handle.
#[no_mangle]
pub unsafe extern "C" fn psl_formula_parse(
    text: *const c_char,
    out: *mut *mut PslFormula,
) -> PslStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        let text = CStr::from_ptr(text).to_str().map_err(|e| {
            set_error(e.to_string());
            Fail(PslStatus::Utf8)
        })?;
        let d = psl::parse_dimacs(text, None)?;
        let handle = Box::into_raw(Box::new(PslFormula {
            formula: d.formula,
            provenance: d.provenance,
        }));
        write_out(out, handle).inspect_err(|_| drop(Box::from_raw(handle)))
    })
}

/// Releases a handle. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn psl_formula_free(f: *mut PslFormula) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Writes the formula, with its provenance line if any, as DIMACS text.
#[no_mangle]
pub unsafe extern "C" fn psl_formula_emit(
    f: *const PslFormula,
    out: *mut *mut c_char,
) -> PslStatus {
    guard(|| {
        let f = formula_ref(f)?;
        write_out(
            out,
            into_c_string(psl::emit_dimacs(&f.formula, f.provenance.as_ref())),
        )
    })
}

/// Number of variables, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn psl_formula_num_vars(f: *const PslFormula) -> usize {
    f.as_ref().map_or(0, |f| f.formula.num_vars())
}

/// Clause width, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn psl_formula_width(f: *const PslFormula) -> usize {
    f.as_ref().map_or(0, |f| f.formula.width())
}

/// Number of clauses, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn psl_formula_num_clauses(f: *const PslFormula) -> usize {
    f.as_ref().map_or(0, |f| f.formula.num_clauses())
}

/// Evaluates the formula at `bits[0..len]`, variable 1 first; nonzero bytes are true.
#[no_mangle]
pub unsafe extern "C" fn psl_formula_eval(
    f: *const PslFormula,
    bits: *const u8,
    len: usize,
    out: *mut bool,
) -> PslStatus {
    guard(|| {
        let f = formula_ref(f)?;
        if bits.is_null() && len > 0 {
            return Err(null("bits"));
        }
        let x = if len == 0 {
            Vec::new()
        } else {
            std::slice::from_raw_parts(bits, len)
                .iter()
                .map(|&b| b != 0)
                .collect()
        };
        let value = f.formula.eval(&Assignment::new(x))?;
        write_out(out, value)
    })
}

/// Samples `m` uniform clauses on ChaCha stream `(seed, stream)`.
#[no_mangle]
pub unsafe extern "C" fn psl_sample_uniform(
    n: u64,
    k: u64,
    m: u64,
    seed: u64,
    stream: u64,
    out: *mut *mut PslFormula,
) -> PslStatus {
    guard(|| {
        let (n, k, m) = (to_usize(n)?, to_usize(k)?, to_usize(m)?);
        let mut rng = RngStream::new(seed, stream).rng();
        let formula = psl::sample_uniform_formula(n, k, m, &mut rng)?;
        let handle = Box::into_raw(Box::new(PslFormula {
            formula,
            provenance: None,
        }));
        write_out(out, handle).inspect_err(|_| drop(Box::from_raw(handle)))
    })
}

/// Samples a planted-mixture formula. When `planted` is non-null it receives
/// the `n` bytes of the planted assignment, variable 1 first.
#[no_mangle]
pub unsafe extern "C" fn psl_sample_planted(
    n: u64,
    k: u64,
    m: u64,
    seed: u64,
    stream: u64,
    out: *mut *mut PslFormula,
    planted: *mut u8,
) -> PslStatus {
    guard(|| {
        let (n, k, m) = (to_usize(n)?, to_usize(k)?, to_usize(m)?);
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let mut rng = RngStream::new(seed, stream).rng();
        let inst = psl::sample_planted_mixture(n, k, m, &mut rng)?;
        if !planted.is_null() {
            let dst = std::slice::from_raw_parts_mut(planted, n);
            for (d, &b) in dst.iter_mut().zip(inst.planted.bits()) {
                *d = b as u8;
            }
        }
        let handle = Box::into_raw(Box::new(PslFormula {
            formula: inst.formula,
            provenance: None,
        }));
        write_out(out, handle)
    })
}

/// Exact model count as a decimal string.
#[no_mangle]
pub unsafe extern "C" fn psl_count_models(
    f: *const PslFormula,
    limit: u64,
    out: *mut *mut c_char,
) -> PslStatus {
    guard(|| {
        let f = formula_ref(f)?;
        let z = psl::count_models(&f.formula, to_usize(limit)?)?;
        write_out(out, into_c_string(z.to_string()))
    })
}

/// `E[Z]` under the uniform law as a reduced fraction of decimal strings.
#[no_mangle]
pub unsafe extern "C" fn psl_expected_count(
    n: u64,
    k: u64,
    m: u64,
    num: *mut *mut c_char,
    den: *mut *mut c_char,
) -> PslStatus {
    guard(|| {
        if num.is_null() || den.is_null() {
            return Err(null("output pointer"));
        }
        let e = psl::expected_count(to_usize(n)?, to_usize(k)?, to_usize(m)?)?;
        write_out(num, into_c_string(e.numer().to_string()))?;
        write_out(den, into_c_string(e.denom().to_string()))
    })
}

/// Runs one test. An infeasible run returns `PSL_STATUS_OK` with `feasible` false.
#[no_mangle]
pub unsafe extern "C" fn psl_detect(
    f: *const PslFormula,
    test: PslTest,
    limit: u64,
    out: *mut PslTestResult,
) -> PslStatus {
    guard(|| {
        let f = formula_ref(f)?;
        let test = match test {
            PslTest::Sat => Test::Sat,
            PslTest::Lr => Test::Lr,
            PslTest::Coupling => Test::Coupling,
        };
        let outcome = test.run(&f.formula, to_usize(limit)?)?;
        let mut r = PslTestResult {
            decision: outcome.decision,
            feasible: outcome.feasible,
            ..Default::default()
        };
        match &outcome.statistic {
            Statistic::Coupling { p, t, d } => (r.t, r.p, r.d) = (*t, *p, *d),
            Statistic::Count(c) => {
                r.cmp = match c.comparison {
                    Ordering::Less => -1,
                    Ordering::Equal => 0,
                    Ordering::Greater => 1,
                }
            }
            _ => {}
        }
        write_out(out, r)
    })
}

/// Clause-count constant `C` that makes the coupling test's risk at most `delta`.
#[no_mangle]
pub unsafe extern "C" fn psl_coupling_sample_bound(k: u64, delta: f64, out: *mut f64) -> PslStatus {
    guard(|| write_out(out, psl::coupling_sample_bound(to_usize(k)?, delta)?))
}

/// `2 √(νn) / k`, the clause count below which no test beats risk `1/2 − ν`.
#[no_mangle]
pub unsafe extern "C" fn psl_lower_bound_m(nu: f64, n: u64, k: u64, out: *mut f64) -> PslStatus {
    guard(|| write_out(out, psl::lower_bound_m(nu, to_usize(n)?, to_usize(k)?)?))
}
