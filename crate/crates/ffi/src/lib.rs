//! C interface to the chebarch library.
//!
//! Every fallible call returns a [`ChebStatus`]; the message of the most
//! recent failure on the calling thread is available from
//! [`cheb_last_error_message`]. Objects that outlive a call are handed out
//! as opaque handles and released with their matching `_free` function.

use std::cell::RefCell;
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use chebarch::adc::{build_timeline, power_report, split_samples, AdcSplit, Converter, SplitPolicy};
use chebarch::systolic::{compute_metrics, simulate_window, PeakOps, SystolicConfig, SystolicTrace};
use chebarch::{cheb_nodes, compute_coeffs, CoefficientSet, Error, Interval};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChebStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInterval = 2,
    LengthMismatch = 3,
    IndexOutOfRange = 4,
    DuplicateNode = 5,
    UnknownTag = 6,
    InvalidParameter = 7,
    EmptyQuerySet = 8,
    ScheduleViolation = 9,
    BufferTooSmall = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChebSplitPolicy {
    BothAdjacent = 0,
    PrecedingGapOnly = 1,
    GreedyNonoverlap = 2,
}

impl From<ChebSplitPolicy> for SplitPolicy {
    fn from(p: ChebSplitPolicy) -> Self {
        match p {
            ChebSplitPolicy::BothAdjacent => SplitPolicy::BothAdjacent,
            ChebSplitPolicy::PrecedingGapOnly => SplitPolicy::PrecedingGapOnly,
            ChebSplitPolicy::GreedyNonoverlap => SplitPolicy::GreedyNonoverlap,
        }
    }
}

/// Metrics of a simulated run. All three stages report numeric peaks.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ChebMetrics {
    pub peak_ops_coeff: usize,
    pub peak_ops_poly: usize,
    pub peak_ops_fir: usize,
    pub latency: u64,
    pub hue_percent: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ChebPower {
    pub a_flash: usize,
    pub a_sar: usize,
    pub total_au: u64,
    pub baseline_au: u64,
    pub savings_percent: f64,
}

/// Opaque coefficient set.
pub struct ChebCoeffs(CoefficientSet);

/// Opaque systolic trace together with the configuration that produced it.
pub struct ChebTrace {
    trace: SystolicTrace,
    config: SystolicConfig,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(err: &Error) -> ChebStatus {
    match err {
        Error::InvalidInterval { .. } => ChebStatus::InvalidInterval,
        Error::LengthMismatch { .. } => ChebStatus::LengthMismatch,
        Error::IndexOutOfRange { .. } => ChebStatus::IndexOutOfRange,
        Error::DuplicateNode(_) => ChebStatus::DuplicateNode,
        Error::UnknownTag { .. } => ChebStatus::UnknownTag,
        Error::InvalidParameter { .. } => ChebStatus::InvalidParameter,
        Error::EmptyQuerySet => ChebStatus::EmptyQuerySet,
        Error::ScheduleViolation(_) => ChebStatus::ScheduleViolation,
    }
}

enum Fail {
    Lib(Error),
    Null(&'static str),
    Small { needed: usize, given: usize },
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(body: impl FnOnce() -> Result<(), Fail>) -> ChebStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => ChebStatus::Ok,
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Null(name))) => {
            set_error(format!("`{name}` is null"));
            ChebStatus::NullPointer
        }
        Ok(Err(Fail::Small { needed, given })) => {
            set_error(format!("buffer holds {given} values, {needed} needed"));
            ChebStatus::BufferTooSmall
        }
        Err(_) => {
            set_error("internal panic".into());
            ChebStatus::Panic
        }
    }
}

unsafe fn input<'a>(data: *const f64, len: usize, name: &'static str) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(Fail::Null(name));
    }
    Ok(slice::from_raw_parts(data, len))
}

unsafe fn copy_out<T: Copy>(values: &[T], out: *mut T, capacity: usize) -> Result<(), Fail> {
    if values.len() > capacity {
        return Err(Fail::Small {
            needed: values.len(),
            given: capacity,
        });
    }
    if values.is_empty() {
        return Ok(());
    }
    if out.is_null() {
        return Err(Fail::Null("out"));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    Ok(())
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null("out"));
    }
    out.write(value);
    Ok(())
}

/// Copies the last error message of this thread into `buf` as a
/// NUL-terminated string, truncating if needed. Returns the full message
/// length excluding the terminator.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn cheb_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Writes the `degree + 1` Chebyshev nodes on `[lo, hi]` in ascending order.
///
/// # Safety
/// `out` must be valid for `out_len` writes.
#[no_mangle]
pub unsafe extern "C" fn cheb_nodes_fill(degree: usize, lo: f64, hi: f64, out: *mut f64, out_len: usize) -> ChebStatus {
    guard(|| {
        let window = cheb_nodes(degree, Interval::new(lo, hi)?);
        copy_out(window.nodes(), out, out_len)
    })
}

/// Computes expansion coefficients from `len` samples taken at the ascending
/// Chebyshev nodes of `[lo, hi]`.
///
/// # Safety
/// `samples` must be valid for `len` reads and `out` for one write.
#[no_mangle]
pub unsafe extern "C" fn cheb_coeffs_new(
    samples: *const f64,
    len: usize,
    lo: f64,
    hi: f64,
    out: *mut *mut ChebCoeffs,
) -> ChebStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        let samples = input(samples, len, "samples")?;
        if samples.is_empty() {
            return Err(Error::LengthMismatch { expected: 1, actual: 0 }.into());
        }
        let window = cheb_nodes(samples.len() - 1, Interval::new(lo, hi)?);
        let set = compute_coeffs(samples, &window)?;
        *out = Box::into_raw(Box::new(ChebCoeffs(set)));
        Ok(())
    })
}

/// Number of coefficients held, or 0 for a null handle.
///
/// # Safety
/// `handle` must be null or come from [`cheb_coeffs_new`].
#[no_mangle]
pub unsafe extern "C" fn cheb_coeffs_len(handle: *const ChebCoeffs) -> usize {
    handle.as_ref().map_or(0, |h| h.0.coeffs().len())
}

/// # Safety
/// `handle` must be null or come from [`cheb_coeffs_new`]; `out` must be
/// valid for `out_len` writes.
#[no_mangle]
pub unsafe extern "C" fn cheb_coeffs_get(handle: *const ChebCoeffs, out: *mut f64, out_len: usize) -> ChebStatus {
    guard(|| {
        let h = handle.as_ref().ok_or(Fail::Null("handle"))?;
        copy_out(h.0.coeffs(), out, out_len)
    })
}

/// # Safety
/// `handle` must be null or come from [`cheb_coeffs_new`]; `out` must be
/// valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cheb_coeffs_interpolate(handle: *const ChebCoeffs, x: f64, out: *mut f64) -> ChebStatus {
    guard(|| {
        let h = handle.as_ref().ok_or(Fail::Null("handle"))?;
        write(out, h.0.interpolate(x))
    })
}

/// # Safety
/// `handle` must be null or come from [`cheb_coeffs_new`] and not be used
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn cheb_coeffs_free(handle: *mut ChebCoeffs) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Runs the word-serial datapath on one window of `n_samples` samples
/// (taken at the ascending Chebyshev nodes of `[lo, hi]`) and `n_queries`
/// query points.
///
/// # Safety
/// Pointers must be valid for the given lengths; `out` for one write.
#[no_mangle]
pub unsafe extern "C" fn cheb_systolic_run(
    samples: *const f64,
    n_samples: usize,
    queries: *const f64,
    n_queries: usize,
    lo: f64,
    hi: f64,
    out: *mut *mut ChebTrace,
) -> ChebStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        let samples = input(samples, n_samples, "samples")?;
        let queries = input(queries, n_queries, "queries")?;
        let config = SystolicConfig::proposed(n_samples).with_interval(Interval::new(lo, hi)?);
        let trace = simulate_window(samples, queries, &config)?;
        *out = Box::into_raw(Box::new(ChebTrace { trace, config }));
        Ok(())
    })
}

/// Number of interpolated outputs, or 0 for a null handle.
///
/// # Safety
/// `handle` must be null or come from [`cheb_systolic_run`].
#[no_mangle]
pub unsafe extern "C" fn cheb_trace_output_count(handle: *const ChebTrace) -> usize {
    handle.as_ref().map_or(0, |h| h.trace.outputs.len())
}

/// Number of simulated cycles, or 0 for a null handle.
///
/// # Safety
/// `handle` must be null or come from [`cheb_systolic_run`].
#[no_mangle]
pub unsafe extern "C" fn cheb_trace_cycle_count(handle: *const ChebTrace) -> usize {
    handle.as_ref().map_or(0, |h| h.trace.cycles.len())
}

/// Output values in query order.
///
/// # Safety
/// `handle` must be null or come from [`cheb_systolic_run`]; `out` must be
/// valid for `out_len` writes.
#[no_mangle]
pub unsafe extern "C" fn cheb_trace_outputs(handle: *const ChebTrace, out: *mut f64, out_len: usize) -> ChebStatus {
    guard(|| {
        let h = handle.as_ref().ok_or(Fail::Null("handle"))?;
        let mut outs = h.trace.outputs.clone();
        outs.sort_by_key(|o| o.query_index);
        let values: Vec<f64> = outs.iter().map(|o| o.value).collect();
        copy_out(&values, out, out_len)
    })
}

/// # Safety
/// `handle` must be null or come from [`cheb_systolic_run`]; `out` must be
/// valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cheb_trace_metrics(handle: *const ChebTrace, out: *mut ChebMetrics) -> ChebStatus {
    guard(|| {
        let h = handle.as_ref().ok_or(Fail::Null("handle"))?;
        let m = compute_metrics(&h.trace, &h.config);
        let count = |p: PeakOps| match p {
            PeakOps::Count(n) => n,
            PeakOps::Stored | PeakOps::ExceedsStored(_) => 0,
        };
        write(
            out,
            ChebMetrics {
                peak_ops_coeff: count(m.peak_ops_coeff),
                peak_ops_poly: count(m.peak_ops_poly),
                peak_ops_fir: count(m.peak_ops_fir),
                latency: m.latency,
                hue_percent: m.hue_percent,
            },
        )
    })
}

/// # Safety
/// `handle` must be null or come from [`cheb_systolic_run`] and not be used
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn cheb_trace_free(handle: *mut ChebTrace) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Splits a window of `degree + 1` samples between the flash and SAR
/// converters. `assignments` receives 0 for flash and 1 for SAR per sample.
///
/// # Safety
/// `assignments` must be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn cheb_adc_split(
    degree: usize,
    t_sar: f64,
    policy: ChebSplitPolicy,
    assignments: *mut u8,
    len: usize,
) -> ChebStatus {
    guard(|| {
        let split = split_samples(&build_timeline(degree)?, t_sar, policy.into())?;
        let codes: Vec<u8> = split
            .assignments
            .iter()
            .map(|c| u8::from(*c == Converter::Sar))
            .collect();
        copy_out(&codes, assignments, len)
    })
}

/// Comparator energy of `a_flash` flash and `a_sar` SAR conversions at
/// `bits` resolution against `baseline_points` flash conversions.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cheb_power(
    a_flash: usize,
    a_sar: usize,
    bits: u32,
    baseline_points: usize,
    out: *mut ChebPower,
) -> ChebStatus {
    guard(|| {
        let r = power_report(&AdcSplit::from_counts(a_flash, a_sar), bits, baseline_points)?;
        write(
            out,
            ChebPower {
                a_flash,
                a_sar,
                total_au: r.total_au,
                baseline_au: r.baseline_au,
                savings_percent: r.savings_percent,
            },
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_codes_are_stable() {
        assert_eq!(ChebStatus::Ok as i32, 0);
        assert_eq!(status_of(&Error::EmptyQuerySet), ChebStatus::EmptyQuerySet);
        assert_eq!(
            status_of(&Error::InvalidInterval { lo: 1.0, hi: 0.0 }),
            ChebStatus::InvalidInterval
        );
    }

    #[test]
    fn panics_become_status() {
        assert_eq!(guard(|| panic!("boom")), ChebStatus::Panic);
    }
}
