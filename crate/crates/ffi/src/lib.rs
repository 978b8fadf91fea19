//! C ABI for `freqcap`.
//!
//! Every fallible function returns a [`FreqcapStatus`]; on failure a message
//! is available from [`freqcap_last_error_message`] on the same thread.
//! Objects are opaque handles created by `*_new` functions and released by
//! the matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use freqcap::capacity_bounds::{
    achievability_bound, converse_bound, dna_log_cardinality_lower_bound, optimal_sampling_ratio,
};
use freqcap::channel::{transmit, ChannelParams};
use freqcap::distributions::{truncated_rounded_input_pmf, DiscretePmf};
use freqcap::mutual_info::{mutual_information, PoissonChannelSpec};
use freqcap::{CountVector, Error, RngStream};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreqcapStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Dimension = 3,
    Codeword = 4,
    Unsupported = 5,
    Numeric = 6,
    Quadrature = 7,
    AttemptBudget = 8,
    Config = 9,
    Io = 10,
    Framing = 11,
    Panic = 12,
}

/// Seeded random stream.
pub struct FreqcapRng {
    inner: RngStream,
}

/// Finite-support probability mass function on the integers.
pub struct FreqcapPmf {
    inner: DiscretePmf,
}

/// Parameters of the multinomial frequency channel.
pub struct FreqcapChannel {
    inner: ChannelParams,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> FreqcapStatus {
    match e {
        Error::Domain { .. } => FreqcapStatus::Domain,
        Error::Dimension { .. } => FreqcapStatus::Dimension,
        Error::Codeword(_) => FreqcapStatus::Codeword,
        Error::Unsupported(_) => FreqcapStatus::Unsupported,
        Error::Numeric { .. } => FreqcapStatus::Numeric,
        Error::Quadrature { .. } => FreqcapStatus::Quadrature,
        Error::AttemptBudget { .. } => FreqcapStatus::AttemptBudget,
        Error::Config(_) => FreqcapStatus::Config,
        Error::Stage { source, .. } => status_of(source),
        Error::Io { .. } => FreqcapStatus::Io,
        Error::Framing(_) => FreqcapStatus::Framing,
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

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> FreqcapStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FreqcapStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("null pointer passed as {what}"));
            FreqcapStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_last_error("internal panic".to_string());
            FreqcapStatus::Panic
        }
    }
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn in_ref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn in_slice<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn freqcap_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn freqcap_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a random stream; identical `(seed, stream_id)` give identical draws.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn freqcap_rng_new(seed: u64, stream_id: u64, out: *mut *mut FreqcapRng) -> FreqcapStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = Box::into_raw(Box::new(FreqcapRng {
            inner: RngStream::new(seed, stream_id),
        }));
        Ok(())
    })
}

/// # Safety
/// `rng` must come from [`freqcap_rng_new`] and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn freqcap_rng_free(rng: *mut FreqcapRng) {
    if !rng.is_null() {
        drop(Box::from_raw(rng));
    }
}

/// Converse bound `½·ln(min(r, e·g))` in nats.
///
/// # Safety
/// `out` must be a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn freqcap_converse_bound(g: f64, r: f64, out: *mut f64) -> FreqcapStatus {
    guard(|| {
        *out_ref(out, "out")? = converse_bound(g, r)?.get();
        Ok(())
    })
}

/// Achievability bound `½·ln r − Ψ(r/g)` in nats.
///
/// # Safety
/// `out` must be a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn freqcap_achievability_bound(g: f64, r: f64, out: *mut f64) -> FreqcapStatus {
    guard(|| {
        *out_ref(out, "out")? = achievability_bound(g, r)?.get();
        Ok(())
    })
}

/// Sampling-to-budget ratio maximizing `½·ln μ − Ψ(μ)` and the maximum.
///
/// # Safety
/// Both pointers must be valid and writable.
#[no_mangle]
pub unsafe extern "C" fn freqcap_optimal_ratio(out_ratio: *mut f64, out_offset: *mut f64) -> FreqcapStatus {
    guard(|| {
        let ratio = out_ref(out_ratio, "out_ratio")?;
        let offset = out_ref(out_offset, "out_offset")?;
        let opt = optimal_sampling_ratio()?;
        *ratio = opt.mu_star;
        *offset = opt.offset.get();
        Ok(())
    })
}

/// DNA storage log-cardinality: the leading term and the corrected lower bound, in nats.
///
/// # Safety
/// Both output pointers must be valid and writable.
#[no_mangle]
pub unsafe extern "C" fn freqcap_dna_log_cardinality(
    kl_total: f64,
    beta: f64,
    alphabet_size: u32,
    optimized: bool,
    out_leading: *mut f64,
    out_lower: *mut f64,
) -> FreqcapStatus {
    guard(|| {
        let leading = out_ref(out_leading, "out_leading")?;
        let lower = out_ref(out_lower, "out_lower")?;
        let s = dna_log_cardinality_lower_bound(kl_total, beta, alphabet_size, optimized)?;
        *leading = s.log_m_leading.get();
        *lower = s.log_m_lower.get();
        Ok(())
    })
}

/// PMF on `offset, offset+1, …` proportional to `weights`.
///
/// # Safety
/// `weights` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn freqcap_pmf_from_weights(
    offset: u64,
    weights: *const f64,
    len: usize,
    out: *mut *mut FreqcapPmf,
) -> FreqcapStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let w = in_slice(weights, len, "weights")?;
        let inner = DiscretePmf::from_weights(offset, w)?;
        *out = Box::into_raw(Box::new(FreqcapPmf { inner }));
        Ok(())
    })
}

/// Truncated, rounded `Gamma(1/2, 2g)` input law with exponent `rho`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn freqcap_pmf_truncated_gamma(g: f64, rho: f64, out: *mut *mut FreqcapPmf) -> FreqcapStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let inner = truncated_rounded_input_pmf(g, rho)?;
        *out = Box::into_raw(Box::new(FreqcapPmf { inner }));
        Ok(())
    })
}

/// # Safety
/// `pmf` must be a live handle; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn freqcap_pmf_support(pmf: *const FreqcapPmf, out_min: *mut u64, out_max: *mut u64) -> FreqcapStatus {
    guard(|| {
        let pmf = in_ref(pmf, "pmf")?;
        let lo = out_ref(out_min, "out_min")?;
        let hi = out_ref(out_max, "out_max")?;
        (*lo, *hi) = pmf.inner.support_bounds();
        Ok(())
    })
}

/// # Safety
/// `pmf` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn freqcap_pmf_mean(pmf: *const FreqcapPmf, out: *mut f64) -> FreqcapStatus {
    guard(|| {
        *out_ref(out, "out")? = in_ref(pmf, "pmf")?.inner.mean();
        Ok(())
    })
}

/// # Safety
/// `pmf` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn freqcap_pmf_prob(pmf: *const FreqcapPmf, k: u64, out: *mut f64) -> FreqcapStatus {
    guard(|| {
        *out_ref(out, "out")? = in_ref(pmf, "pmf")?.inner.prob(k);
        Ok(())
    })
}

/// # Safety
/// `pmf` must come from a `freqcap_pmf_*` constructor and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn freqcap_pmf_free(pmf: *mut FreqcapPmf) {
    if !pmf.is_null() {
        drop(Box::from_raw(pmf));
    }
}

/// `I(X; Z)` in nats for `Z | X ~ Poi(gain·X)` and `X ~ pmf`.
///
/// # Safety
/// `pmf` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn freqcap_mutual_information(pmf: *const FreqcapPmf, gain: f64, out: *mut f64) -> FreqcapStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let pmf = in_ref(pmf, "pmf")?;
        let spec = PoissonChannelSpec::new(pmf.inner.clone(), gain)?;
        *out = mutual_information(&spec)?.get();
        Ok(())
    })
}

/// Channel with `n` types, budget `n·g` and `n·r` reads (`n·r` must be an integer).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn freqcap_channel_new(n: usize, g: f64, r: f64, out: *mut *mut FreqcapChannel) -> FreqcapStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let inner = ChannelParams::new(n, g, r)?;
        *out = Box::into_raw(Box::new(FreqcapChannel { inner }));
        Ok(())
    })
}

/// # Safety
/// `channel` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn freqcap_channel_total_samples(channel: *const FreqcapChannel, out: *mut u64) -> FreqcapStatus {
    guard(|| {
        *out_ref(out, "out")? = in_ref(channel, "channel")?.inner.total_samples();
        Ok(())
    })
}

/// # Safety
/// `channel` must come from [`freqcap_channel_new`] and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn freqcap_channel_free(channel: *mut FreqcapChannel) {
    if !channel.is_null() {
        drop(Box::from_raw(channel));
    }
}

/// Transmits codeword `x` (length `len`) and writes the read counts to `y` (length `len`).
///
/// # Safety
/// `channel` and `rng` must be live handles; `x` must hold `len` readable and
/// `y` `len` writable `uint64_t` values.
#[no_mangle]
pub unsafe extern "C" fn freqcap_transmit(
    channel: *const FreqcapChannel,
    rng: *mut FreqcapRng,
    x: *const u64,
    y: *mut u64,
    len: usize,
) -> FreqcapStatus {
    guard(|| {
        let channel = in_ref(channel, "channel")?;
        let rng = out_ref(rng, "rng")?;
        let codeword = CountVector::new(in_slice(x, len, "x")?.to_vec());
        if len > 0 && y.is_null() {
            return Err(Failure::Null("y"));
        }
        let out = transmit(&codeword, &channel.inner, &mut rng.inner)?;
        if len > 0 {
            std::slice::from_raw_parts_mut(y, len).copy_from_slice(out.as_slice());
        }
        Ok(())
    })
}
