//! C interface to `multiclosure`.
//!
//! Networks and fit results are opaque handles owned by the caller and
//! released with the matching `*_free` function. Every fallible call returns
//! an [`McStatus`]; on failure the message is available from
//! [`mcl_last_error`] until the next failing call on the same thread.
//! Statistic matrices are written row-major into caller buffers of `n * n`
//! doubles.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use multiclosure::ghype::{self, Covariate, FitOptions, LikelihoodMode, XiKind};
use multiclosure::mle::OptimOptions;
use multiclosure::multigraph::{read_contact_records, read_edge_csv};
use multiclosure::statistics::variance_explained;
use multiclosure::synth::{self, GeneratorKind, GeneratorSpec};
use multiclosure::{countmodel, Error, FitResult, MultiEdgeNetwork, StatisticMatrix, StatisticSpec};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    BufferTooSmall = 3,
    Input = 4,
    Undefined = 5,
    UnknownAttribute = 6,
    Model = 7,
    Quadrature = 8,
    Convergence = 9,
    Io = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McXi {
    /// `k_i * k_j`
    Config = 0,
    /// `<k>^2` on every dyad
    MeanDegree = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McLikelihood {
    Auto = 0,
    Exact = 1,
    Multinomial = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McGenerator {
    RandomComplete = 0,
    RandomUniform = 1,
    Triangles = 2,
    Mixed = 3,
}

/// One fitted coefficient. `identified == false` leaves `std_err` and `p_value` NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct McCoefficient {
    pub estimate: f64,
    pub std_err: f64,
    pub p_value: f64,
    pub identified: bool,
}

pub struct McNetwork {
    inner: MultiEdgeNetwork,
}

pub struct McFitResult {
    inner: FitResult,
    names: Vec<CString>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> McStatus {
    match e {
        Error::Input(_) | Error::Row { .. } | Error::Csv(_) | Error::Json(_) => McStatus::Input,
        Error::Undefined(_) => McStatus::Undefined,
        Error::UnknownAttribute(_) => McStatus::UnknownAttribute,
        Error::Model(_) | Error::Degenerate(_) | Error::ConstantCovariate(_) => McStatus::Model,
        Error::Quadrature(_) => McStatus::Quadrature,
        Error::NonConvergence { .. } => McStatus::Convergence,
        Error::Io(_) => McStatus::Io,
    }
}

struct Fail(McStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> McStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => McStatus::Ok,
        Ok(Err(Fail(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            McStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(McStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(McStatus::InvalidUtf8, format!("`{what}` is not valid UTF-8")))
}

unsafe fn network<'a>(p: *const McNetwork) -> Result<&'a MultiEdgeNetwork, Fail> {
    p.as_ref().map(|h| &h.inner).ok_or_else(|| null("network"))
}

fn boxed_network(net: MultiEdgeNetwork, out: *mut *mut McNetwork) {
    // SAFETY: callers check `out` for null first
    unsafe { *out = Box::into_raw(Box::new(McNetwork { inner: net })) };
}

fn open(path: &str) -> Result<File, Fail> {
    File::open(path).map_err(|e| Fail(McStatus::Io, format!("{path}: {e}")))
}

/// Message of the last failed call on this thread, or null. Owned by the
/// library; valid until the next failing call.
#[no_mangle]
pub extern "C" fn mcl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a network on nodes `0..n` from upper-triangle dyad counts in
/// row-major order (`len` must be `n (n - 1) / 2`).
///
/// # Safety
/// `counts` must point to `len` readable values and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mcl_network_from_dyad_counts(
    n: usize,
    counts: *const u64,
    len: usize,
    out: *mut *mut McNetwork,
) -> McStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if counts.is_null() && len > 0 {
            return Err(null("counts"));
        }
        let slice = if len == 0 { &[][..] } else { std::slice::from_raw_parts(counts, len) };
        boxed_network(MultiEdgeNetwork::from_dyad_counts(n, slice)?, out);
        Ok(())
    })
}

/// Reads an edge-list CSV (`source,target[,count]`).
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mcl_network_read_csv(path: *const c_char, out: *mut *mut McNetwork) -> McStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let rows = read_edge_csv(open(path)?)?;
        boxed_network(MultiEdgeNetwork::from_edge_list(&rows, &[])?, out);
        Ok(())
    })
}

/// Reads SocioPatterns contact records (`t i j Ci Cj`); the network gets a
/// `class` attribute.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mcl_network_read_contacts(path: *const c_char, out: *mut *mut McNetwork) -> McStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        if out.is_null() {
            return Err(null("out"));
        }
        boxed_network(read_contact_records(open(path)?)?, out);
        Ok(())
    })
}

/// Attaches the columns of a `node,<attr>[,...]` CSV.
///
/// # Safety
/// `net` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn mcl_network_read_attributes(net: *mut McNetwork, path: *const c_char) -> McStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let handle = net.as_mut().ok_or_else(|| null("network"))?;
        handle.inner = handle.inner.clone().with_attribute_csv(open(path)?)?;
        Ok(())
    })
}

/// Sets attribute `name` from `n` node values, in node order.
///
/// # Safety
/// `net` must be a live handle; `name` and each of the `n` `values` must be
/// NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn mcl_network_set_attribute(
    net: *mut McNetwork,
    name: *const c_char,
    values: *const *const c_char,
    n: usize,
) -> McStatus {
    guard(|| {
        let name = str_arg(name, "name")?;
        let handle = net.as_mut().ok_or_else(|| null("network"))?;
        if values.is_null() && n > 0 {
            return Err(null("values"));
        }
        let mut owned = Vec::with_capacity(n);
        for i in 0..n {
            owned.push(str_arg(*values.add(i), "values[i]")?.to_string());
        }
        handle.inner = handle.inner.clone().with_attribute(name, owned)?;
        Ok(())
    })
}

/// # Safety
/// `net` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mcl_network_free(net: *mut McNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// Node count (0 for a null handle).
///
/// # Safety
/// `net` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mcl_network_node_count(net: *const McNetwork) -> usize {
    net.as_ref().map_or(0, |h| h.inner.n())
}

/// Total number of edges (0 for a null handle).
///
/// # Safety
/// `net` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mcl_network_edge_count(net: *const McNetwork) -> u64 {
    net.as_ref().map_or(0, |h| h.inner.edge_count())
}

/// Writes the `n` node degrees into `out`.
///
/// # Safety
/// `net` must be a live handle and `out` must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn mcl_network_degrees(net: *const McNetwork, out: *mut u64, len: usize) -> McStatus {
    guard(|| {
        let net = network(net)?;
        if out.is_null() {
            return Err(null("out"));
        }
        if len < net.n() {
            return Err(Fail(McStatus::BufferTooSmall, format!("need {} values, got {len}", net.n())));
        }
        let degrees = net.degrees().degrees;
        ptr::copy_nonoverlapping(degrees.as_ptr(), out, degrees.len());
        Ok(())
    })
}

unsafe fn compute(net: *const McNetwork, name: *const c_char) -> Result<(usize, StatisticMatrix), Fail> {
    let net = network(net)?;
    let spec: StatisticSpec = str_arg(name, "statistic")?.parse()?;
    Ok((net.n(), spec.compute(net)?))
}

/// Computes a statistic (`weighted_sp`, `unweighted_sp`, `degree`,
/// `match:<attr>`) into `out`, row-major `n * n`.
///
/// # Safety
/// `net` must be a live handle, `name` a NUL-terminated string and `out`
/// must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn mcl_statistic(
    net: *const McNetwork,
    name: *const c_char,
    out: *mut f64,
    len: usize,
) -> McStatus {
    guard(|| {
        let (n, stat) = compute(net, name)?;
        if out.is_null() {
            return Err(null("out"));
        }
        if len < n * n {
            return Err(Fail(McStatus::BufferTooSmall, format!("need {} values, got {len}", n * n)));
        }
        ptr::copy_nonoverlapping(stat.values().as_ptr(), out, n * n);
        Ok(())
    })
}

/// R² of the dyad counts regressed on the named statistic.
///
/// # Safety
/// `net` must be a live handle, `name` a NUL-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mcl_variance_explained(net: *const McNetwork, name: *const c_char, out: *mut f64) -> McStatus {
    guard(|| {
        let (_, stat) = compute(net, name)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = variance_explained(network(net)?, &stat)?;
        Ok(())
    })
}

unsafe fn statistics(net: &MultiEdgeNetwork, list: *const c_char) -> Result<Vec<(String, StatisticMatrix)>, Fail> {
    let list = str_arg(list, "covariates")?;
    let mut out = Vec::new();
    for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let spec: StatisticSpec = name.parse()?;
        out.push((spec.to_string(), spec.compute(net)?));
    }
    Ok(out)
}

fn boxed_fit(fit: FitResult, out: *mut *mut McFitResult) {
    let names = fit
        .coefficients
        .iter()
        .map(|c| CString::new(c.name.replace('\0', " ")).expect("nul bytes removed"))
        .collect();
    // SAFETY: callers check `out` for null first
    unsafe { *out = Box::into_raw(Box::new(McFitResult { inner: fit, names })) };
}

/// Fits gHypEG with a comma-separated covariate list, e.g.
/// `"weighted_sp,match:faction"`.
///
/// # Safety
/// `net` must be a live handle, `covariates` a NUL-terminated string and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mcl_fit_ghype(
    net: *const McNetwork,
    covariates: *const c_char,
    xi: McXi,
    likelihood: McLikelihood,
    out: *mut *mut McFitResult,
) -> McStatus {
    guard(|| {
        let net = network(net)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let covs = statistics(net, covariates)?
            .iter()
            .map(|(name, s)| Covariate::from_statistic(name, s))
            .collect::<multiclosure::Result<Vec<_>>>()?;
        let opts = FitOptions {
            xi: match xi {
                McXi::Config => XiKind::Config,
                McXi::MeanDegree => XiKind::MeanDeg,
            },
            likelihood: match likelihood {
                McLikelihood::Auto => LikelihoodMode::Auto,
                McLikelihood::Exact => LikelihoodMode::Exact,
                McLikelihood::Multinomial => LikelihoodMode::Multinomial,
            },
            optim: OptimOptions::default(),
        };
        boxed_fit(ghype::fit(net, covs, opts)?, out);
        Ok(())
    })
}

/// Fits the Poisson count model (`sum`, optional `nonzero`, covariates on
/// their raw scale). An empty covariate list fits the intercept only.
///
/// # Safety
/// `net` must be a live handle, `covariates` a NUL-terminated string and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mcl_fit_count(
    net: *const McNetwork,
    covariates: *const c_char,
    nonzero: bool,
    out: *mut *mut McFitResult,
) -> McStatus {
    guard(|| {
        let net = network(net)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let stats = statistics(net, covariates)?;
        boxed_fit(countmodel::fit(net, &stats, nonzero, OptimOptions::default())?, out);
        Ok(())
    })
}

/// # Safety
/// `fit` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mcl_fit_free(fit: *mut McFitResult) {
    if !fit.is_null() {
        drop(Box::from_raw(fit));
    }
}

/// Number of coefficients (0 for a null handle).
///
/// # Safety
/// `fit` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mcl_fit_coefficient_count(fit: *const McFitResult) -> usize {
    fit.as_ref().map_or(0, |f| f.inner.coefficients.len())
}

/// Name of coefficient `index`, owned by the result handle; null if out of range.
///
/// # Safety
/// `fit` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mcl_fit_coefficient_name(fit: *const McFitResult, index: usize) -> *const c_char {
    fit.as_ref()
        .and_then(|f| f.names.get(index))
        .map_or(ptr::null(), |c| c.as_ptr())
}

/// # Safety
/// `fit` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mcl_fit_coefficient(fit: *const McFitResult, index: usize, out: *mut McCoefficient) -> McStatus {
    guard(|| {
        let fit = fit.as_ref().ok_or_else(|| null("fit"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let c = fit.inner.coefficients.get(index).ok_or_else(|| {
            Fail(McStatus::Input, format!("coefficient {index} out of range ({})", fit.inner.coefficients.len()))
        })?;
        *out = McCoefficient { estimate: c.estimate, std_err: c.std_err, p_value: c.p_value, identified: c.identified };
        Ok(())
    })
}

/// Fitted log-likelihood (NaN for a null handle).
///
/// # Safety
/// `fit` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mcl_fit_log_likelihood(fit: *const McFitResult) -> f64 {
    fit.as_ref().map_or(f64::NAN, |f| f.inner.log_lik)
}

/// # Safety
/// `fit` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mcl_fit_aic(fit: *const McFitResult) -> f64 {
    fit.as_ref().map_or(f64::NAN, |f| f.inner.aic)
}

/// # Safety
/// `fit` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mcl_fit_null_aic(fit: *const McFitResult) -> f64 {
    fit.as_ref().map_or(f64::NAN, |f| f.inner.null_aic)
}

/// The result as JSON (same layout as the CLI). Release with [`mcl_string_free`].
///
/// # Safety
/// `fit` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mcl_fit_to_json(fit: *const McFitResult) -> *mut c_char {
    let Some(fit) = fit.as_ref() else {
        set_error("`fit` is null".into());
        return ptr::null_mut();
    };
    match fit.inner.to_json() {
        Ok(s) => CString::new(s).map_or(ptr::null_mut(), CString::into_raw),
        Err(e) => {
            set_error(e.to_string());
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `s` must be null or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mcl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Generates a synthetic network; nodes are labelled `0..n`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mcl_generate(
    kind: McGenerator,
    n: usize,
    m: u64,
    n_tri: usize,
    seed: u64,
    out: *mut *mut McNetwork,
) -> McStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let kind = match kind {
            McGenerator::RandomComplete => GeneratorKind::RandomComplete,
            McGenerator::RandomUniform => GeneratorKind::RandomUniform,
            McGenerator::Triangles => GeneratorKind::Triangles,
            McGenerator::Mixed => GeneratorKind::Mixed,
        };
        boxed_network(synth::generate(&GeneratorSpec { kind, n, m, n_tri, seed })?, out);
        Ok(())
    })
}
