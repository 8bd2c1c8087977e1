//! C ABI over `sta_tsp`.
//!
//! Instances and results are opaque heap handles owned by the caller and
//! released with the matching `*_free`. Every fallible call returns a
//! [`StaStatus`]; on failure a message is kept per thread and can be read
//! with [`sta_last_error`]. Tours cross the boundary as 1-based `uint32_t`
//! node ids.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sta_tsp::baselines::{aco_solve, sa_solve, AcoConfig, SaConfig};
use sta_tsp::tsplib::{parse_instance, Metric, TspInstance};
use sta_tsp::{sta_solve, tour_length, Error, OperatorParams, RunResult, StaConfig, Tour};

/// Result codes. `STA_STATUS_OK` is zero; everything else is a failure.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidTour = 4,
    DimensionMismatch = 5,
    InvalidConfig = 6,
    InvalidMove = 7,
    InfeasibleMove = 8,
    MetricMismatch = 9,
    Io = 10,
    Serialization = 11,
    BufferTooSmall = 12,
    Panic = 13,
}

/// Edge weight function used for distances.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StaMetric {
    /// Unrounded Euclidean distance.
    RawEuc = 0,
    Euc2d = 1,
    Geo = 2,
    Att = 3,
}

impl From<StaMetric> for Metric {
    fn from(m: StaMetric) -> Self {
        match m {
            StaMetric::RawEuc => Metric::RawEuc,
            StaMetric::Euc2d => Metric::Euc2d,
            StaMetric::Geo => Metric::Geo,
            StaMetric::Att => Metric::Att,
        }
    }
}

impl From<Metric> for StaMetric {
    fn from(m: Metric) -> Self {
        match m {
            Metric::RawEuc => StaMetric::RawEuc,
            Metric::Euc2d => StaMetric::Euc2d,
            Metric::Geo => StaMetric::Geo,
            Metric::Att => StaMetric::Att,
        }
    }
}

/// Opaque parsed instance.
pub struct StaInstance {
    inner: TspInstance,
}

/// Opaque solver outcome.
pub struct StaResult {
    inner: RunResult,
}

/// State transition search settings. A non-positive `time_limit_secs`
/// means no time limit.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct StaStaConfig {
    pub search_enforcement: u64,
    pub max_iters: u64,
    pub swap_factor: u64,
    pub shift_factor: u64,
    pub symmetry_factor: u64,
    pub skip_identity_swaps: bool,
    pub seed: u64,
    pub time_limit_secs: f64,
}

/// Simulated annealing settings.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct StaSaConfig {
    pub t0: f64,
    pub cooling: f64,
    pub iters: u64,
    pub seed: u64,
}

/// Ant system settings. `rho` is the fraction of pheromone kept per iteration.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct StaAcoConfig {
    pub alpha: f64,
    pub beta: f64,
    pub rho: f64,
    pub ants: u64,
    pub iters: u64,
    pub seed: u64,
    pub initial_pheromone: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> StaStatus {
    match e {
        Error::Parse(_) => StaStatus::Parse,
        Error::InvalidTour(_) => StaStatus::InvalidTour,
        Error::DimensionMismatch { .. } => StaStatus::DimensionMismatch,
        Error::InvalidConfig(_) => StaStatus::InvalidConfig,
        Error::InvalidMove(_) => StaStatus::InvalidMove,
        Error::InfeasibleMove { .. } => StaStatus::InfeasibleMove,
        Error::MetricMismatch { .. } => StaStatus::MetricMismatch,
        Error::Io(_) => StaStatus::Io,
        Error::Json(_) => StaStatus::Serialization,
    }
}

struct Fail(StaStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(StaStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status plus message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> StaStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => StaStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            StaStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Fail(StaStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

fn to_usize(v: u64, what: &str) -> Result<usize, Fail> {
    usize::try_from(v).map_err(|_| Fail(StaStatus::InvalidConfig, format!("{what} too large: {v}")))
}

unsafe fn emit<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Message for the most recent failure on this thread, or NULL. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn sta_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses TSPLIB text into a new instance using unrounded Euclidean
/// distances.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sta_instance_parse(text: *const c_char, out: *mut *mut StaInstance) -> StaStatus {
    guard(|| {
        let text = str_arg(text, "text")?;
        emit(out, StaInstance { inner: parse_instance(text)? })
    })
}

/// Reads and parses a TSPLIB file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sta_instance_load(path: *const c_char, out: *mut *mut StaInstance) -> StaStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        emit(out, StaInstance { inner: TspInstance::from_file(path)? })
    })
}

/// # Safety
/// `inst` must come from this library and not be freed twice. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn sta_instance_free(inst: *mut StaInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Number of nodes, or 0 for NULL.
///
/// # Safety
/// `inst` must be NULL or a live instance.
#[no_mangle]
pub unsafe extern "C" fn sta_instance_dimension(inst: *const StaInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.inner.n())
}

/// Metric currently used for distances.
///
/// # Safety
/// `inst` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn sta_instance_metric(inst: *const StaInstance, out: *mut StaMetric) -> StaStatus {
    guard(|| {
        let inst = ref_arg(inst, "instance")?;
        let out = out.as_mut().ok_or_else(|| null("output pointer"))?;
        *out = inst.inner.active_metric.into();
        Ok(())
    })
}

/// Switches the distance function. Only unrounded Euclidean or the metric
/// declared in the file are allowed.
///
/// # Safety
/// `inst` must be a live instance.
#[no_mangle]
pub unsafe extern "C" fn sta_instance_set_metric(inst: *mut StaInstance, metric: StaMetric) -> StaStatus {
    guard(|| {
        let inst = inst.as_mut().ok_or_else(|| null("instance"))?;
        inst.inner = inst.inner.clone().with_metric(metric.into())?;
        Ok(())
    })
}

/// Closed tour length of `len` 1-based node ids.
///
/// # Safety
/// `tour` must point to `len` readable values and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sta_tour_length(
    inst: *const StaInstance,
    tour: *const u32,
    len: usize,
    out: *mut f64,
) -> StaStatus {
    guard(|| {
        let inst = ref_arg(inst, "instance")?;
        if tour.is_null() {
            return Err(null("tour"));
        }
        let out = out.as_mut().ok_or_else(|| null("output pointer"))?;
        let ids: Vec<usize> = std::slice::from_raw_parts(tour, len).iter().map(|&v| v as usize).collect();
        let tour = Tour::from_one_based(&ids).map_err(Error::from)?;
        *out = tour_length(&tour, &inst.inner.distance_matrix())?;
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn sta_sta_config_default() -> StaStaConfig {
    let c = StaConfig::default();
    StaStaConfig {
        search_enforcement: c.search_enforcement as u64,
        max_iters: c.max_iters as u64,
        swap_factor: c.params.swap_factor as u64,
        shift_factor: c.params.shift_factor as u64,
        symmetry_factor: c.params.symmetry_factor as u64,
        skip_identity_swaps: c.params.skip_identity_swaps,
        seed: c.seed,
        time_limit_secs: 0.0,
    }
}

#[no_mangle]
pub extern "C" fn sta_sa_config_default() -> StaSaConfig {
    let c = SaConfig::default();
    StaSaConfig { t0: c.t0, cooling: c.cooling, iters: c.iters as u64, seed: c.seed }
}

#[no_mangle]
pub extern "C" fn sta_aco_config_default() -> StaAcoConfig {
    let c = AcoConfig::default();
    StaAcoConfig {
        alpha: c.alpha,
        beta: c.beta,
        rho: c.rho,
        ants: c.ants as u64,
        iters: c.iters as u64,
        seed: c.seed,
        initial_pheromone: c.initial_pheromone,
    }
}

impl StaStaConfig {
    fn to_core(self) -> Result<StaConfig, Fail> {
        Ok(StaConfig {
            search_enforcement: to_usize(self.search_enforcement, "search_enforcement")?,
            max_iters: to_usize(self.max_iters, "max_iters")?,
            params: OperatorParams {
                swap_factor: to_usize(self.swap_factor, "swap_factor")?,
                shift_factor: to_usize(self.shift_factor, "shift_factor")?,
                symmetry_factor: to_usize(self.symmetry_factor, "symmetry_factor")?,
                skip_identity_swaps: self.skip_identity_swaps,
            },
            seed: self.seed,
            time_limit_secs: (self.time_limit_secs > 0.0).then_some(self.time_limit_secs),
        })
    }
}

/// Runs the state transition search.
///
/// # Safety
/// All pointers must be valid; `config` may be NULL for defaults.
#[no_mangle]
pub unsafe extern "C" fn sta_solve_sta(
    inst: *const StaInstance,
    config: *const StaStaConfig,
    out: *mut *mut StaResult,
) -> StaStatus {
    guard(|| {
        let inst = ref_arg(inst, "instance")?;
        let config = config.as_ref().copied().unwrap_or_else(|| sta_sta_config_default()).to_core()?;
        emit(out, StaResult { inner: sta_solve(&inst.inner, &config)? })
    })
}

/// Runs simulated annealing.
///
/// # Safety
/// All pointers must be valid; `config` may be NULL for defaults.
#[no_mangle]
pub unsafe extern "C" fn sta_solve_sa(
    inst: *const StaInstance,
    config: *const StaSaConfig,
    out: *mut *mut StaResult,
) -> StaStatus {
    guard(|| {
        let inst = ref_arg(inst, "instance")?;
        let c = config.as_ref().copied().unwrap_or_else(|| sta_sa_config_default());
        let config = SaConfig { t0: c.t0, cooling: c.cooling, iters: to_usize(c.iters, "iters")?, seed: c.seed };
        emit(out, StaResult { inner: sa_solve(&inst.inner, &config)? })
    })
}

/// Runs the ant system.
///
/// # Safety
/// All pointers must be valid; `config` may be NULL for defaults.
#[no_mangle]
pub unsafe extern "C" fn sta_solve_aco(
    inst: *const StaInstance,
    config: *const StaAcoConfig,
    out: *mut *mut StaResult,
) -> StaStatus {
    guard(|| {
        let inst = ref_arg(inst, "instance")?;
        let c = config.as_ref().copied().unwrap_or_else(|| sta_aco_config_default());
        let config = AcoConfig {
            alpha: c.alpha,
            beta: c.beta,
            rho: c.rho,
            ants: to_usize(c.ants, "ants")?,
            iters: to_usize(c.iters, "iters")?,
            seed: c.seed,
            initial_pheromone: c.initial_pheromone,
        };
        emit(out, StaResult { inner: aco_solve(&inst.inner, &config)? })
    })
}

/// # Safety
/// `res` must come from this library and not be freed twice. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn sta_result_free(res: *mut StaResult) {
    if !res.is_null() {
        drop(Box::from_raw(res));
    }
}

/// Best tour length, or NaN for NULL.
///
/// # Safety
/// `res` must be NULL or a live result.
#[no_mangle]
pub unsafe extern "C" fn sta_result_best_length(res: *const StaResult) -> f64 {
    res.as_ref().map_or(f64::NAN, |r| r.inner.best_length)
}

/// Number of cost evaluations, or 0 for NULL.
///
/// # Safety
/// `res` must be NULL or a live result.
#[no_mangle]
pub unsafe extern "C" fn sta_result_eval_count(res: *const StaResult) -> u64 {
    res.as_ref().map_or(0, |r| r.inner.eval_count)
}

/// Number of nodes in the best tour, or 0 for NULL.
///
/// # Safety
/// `res` must be NULL or a live result.
#[no_mangle]
pub unsafe extern "C" fn sta_result_tour_len(res: *const StaResult) -> usize {
    res.as_ref().map_or(0, |r| r.inner.best_tour.len())
}

/// Number of trace entries (one per iteration), or 0 for NULL.
///
/// # Safety
/// `res` must be NULL or a live result.
#[no_mangle]
pub unsafe extern "C" fn sta_result_trace_len(res: *const StaResult) -> usize {
    res.as_ref().map_or(0, |r| r.inner.trace.len())
}

/// Copies the best tour as 1-based ids into `buf`, which holds `cap` values.
///
/// # Safety
/// `buf` must be writable for `cap` values.
#[no_mangle]
pub unsafe extern "C" fn sta_result_copy_tour(res: *const StaResult, buf: *mut u32, cap: usize) -> StaStatus {
    guard(|| {
        let res = ref_arg(res, "result")?;
        let ids: Vec<u32> = res.inner.best_tour.order().iter().map(|&v| v as u32 + 1).collect();
        copy_out(&ids, buf, cap)
    })
}

/// Copies the best-so-far trace into `buf`, which holds `cap` values.
///
/// # Safety
/// `buf` must be writable for `cap` values.
#[no_mangle]
pub unsafe extern "C" fn sta_result_copy_trace(res: *const StaResult, buf: *mut f64, cap: usize) -> StaStatus {
    guard(|| {
        let res = ref_arg(res, "result")?;
        copy_out(&res.inner.trace, buf, cap)
    })
}

unsafe fn copy_out<T: Copy>(src: &[T], buf: *mut T, cap: usize) -> Result<(), Fail> {
    if buf.is_null() {
        return Err(null("buffer"));
    }
    if cap < src.len() {
        return Err(Fail(StaStatus::BufferTooSmall, format!("buffer holds {cap}, need {}", src.len())));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    Ok(())
}
