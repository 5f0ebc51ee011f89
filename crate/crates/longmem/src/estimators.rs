//! Rescaled range estimators.
//!
//! Both estimators share one evaluation path. A series is truncated to its
//! largest dyadic prefix and cut into non-overlapping windows of scale `υ`
//! for every power of two between the minimum scale and the prefix length.
//! Within a window of length `υ` with mean `μ`:
//!
//! * the *profile* is the running sum of deviations `y_k = Σ_{i≤k}(x_i − μ)`,
//!   whose final value is zero up to rounding;
//! * the *range* is `R = max(y) − min(y)`;
//! * the classical denominator is the maximum-likelihood standard deviation
//!   `S = sqrt(Σ(x_i − μ)² / υ)`;
//! * the modified denominator augments `S²` with Bartlett-weighted
//!   autocovariances up to lag `ξ`:
//!   `S_M = sqrt(S² + 2 Σ_{j=1..ξ} (1 − j/(ξ+1)) γ_j)`, with `γ_j` in the
//!   same `1/υ` convention. The classical statistic is exactly the `ξ = 0`
//!   case, which is how it is computed here — so the two agree bit for bit
//!   when the lag selector is pinned to zero.
//!
//! Window statistics are averaged per scale and the Hurst exponent is the
//! slope of an ordinary least squares fit of log average against log scale.
//! By default the per-scale average is the geometric mean (the arithmetic
//! mean of log statistics); see [`ScaleAggregation`].

use crate::error::{Error, Result};
use crate::processes::IncrementSeries;
use serde::{Deserialize, Serialize};

/// Default minimum scale exponent: windows start at `2^5 = 32` observations.
pub const DEFAULT_MIN_POWER: u32 = 5;

/// Which denominator the estimator uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Classical rescaled range.
    Rs,
    /// Modified rescaled range (Bartlett-corrected denominator with a
    /// data-driven lag per window).
    Mrs,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Rs => "rs",
            Method::Mrs => "mrs",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "rs" => Ok(Method::Rs),
            "mrs" => Ok(Method::Mrs),
            other => Err(Error::Config(format!(
                "unknown method `{other}` (expected one of: rs, mrs)"
            ))),
        }
    }
}

/// How window statistics are combined into one value per scale.
///
/// The geometric mean (default) averages the *logarithms* of the window
/// statistics, which is the natural companion of a log-log regression: the
/// fitted line then passes through the mean of the points that actually
/// enter the fit, and the handful of near-degenerate windows at large scales
/// cannot drag the average through the convexity of the ratio. The
/// arithmetic mean is provided for comparison; it produces systematically
/// lower Hurst estimates in short samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScaleAggregation {
    #[default]
    GeometricMean,
    ArithmeticMean,
}

/// The dyadic scale grid for a series: every power of two from
/// `2^min_power` up to the largest power of two that fits in the series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaleGrid {
    scales: Vec<usize>,
}

impl ScaleGrid {
    /// Build the grid for a series of `len` observations. Fails unless at
    /// least two scales fit (a one-point log-log fit has no slope), i.e.
    /// unless `len ≥ 2^(min_power+1)`.
    pub fn dyadic(len: usize, min_power: u32) -> Result<Self> {
        if min_power == 0 || min_power > 62 {
            return Err(Error::InvalidParameter {
                name: "min_power",
                value: min_power.to_string(),
                constraint: "must be between 1 and 62",
            });
        }
        let required = 1usize << (min_power + 1);
        if len < required {
            return Err(Error::InsufficientData {
                what: "dyadic scale grid (need two scales)",
                required,
                actual: len,
            });
        }
        let max_power = (usize::BITS - 1 - len.leading_zeros()) as u32;
        let scales = (min_power..=max_power).map(|p| 1usize << p).collect();
        Ok(ScaleGrid { scales })
    }

    pub fn scales(&self) -> &[usize] {
        &self.scales
    }

    /// The dyadic prefix length actually analyzed (the largest scale).
    pub fn analyzed_len(&self) -> usize {
        *self.scales.last().expect("grid is never empty")
    }
}

/// Per-scale outcome inside a curve.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalePoint {
    pub scale: usize,
    /// Aggregated rescaled range at this scale.
    pub value: f64,
    /// Number of windows the scale was cut into.
    pub windows: usize,
    /// Windows skipped for zero dispersion or numeric overflow.
    pub skipped: usize,
    /// Windows whose Bartlett lag was capped at `scale − 1`.
    pub lag_capped: usize,
}

/// Rescaled range statistics across a scale grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RescaledRangeCurve {
    pub method: Method,
    pub aggregation: ScaleAggregation,
    /// Scales where at least one window survived, in ascending order.
    pub points: Vec<ScalePoint>,
    /// Scales where every window was skipped.
    pub dropped_scales: Vec<usize>,
    /// The dyadic prefix length the statistics were computed on.
    pub analyzed_len: usize,
}

/// A fitted Hurst exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct HurstEstimate {
    pub hurst: f64,
    /// Intercept of the log-log fit (natural logs).
    pub intercept: f64,
    pub method: Method,
    pub aggregation: ScaleAggregation,
    /// Scales that entered the fit.
    pub scales: Vec<usize>,
    pub analyzed_len: usize,
    /// Residual sum of squares of the log-log fit.
    pub residual_ss: f64,
}

/// Diagnostic statistics of a single window.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowStats {
    pub mean: f64,
    pub range: f64,
    pub std_dev: f64,
    pub rho1: f64,
    pub lag: usize,
    pub lag_capped: bool,
    /// Denominator actually used (equals `std_dev` under [`Method::Rs`]).
    pub denominator: f64,
    pub rescaled_range: f64,
}

/// How the Bartlett lag is chosen per window.
#[derive(Clone, Copy)]
enum LagPolicy {
    /// Always zero: the classical statistic.
    Zero,
    /// The data-driven optimal lag (see [`lag_from_rho`]).
    Adaptive,
    /// A fixed lag, capped per window at `scale − 1`.
    Fixed(usize),
}

enum WindowOutcome {
    Value { rescaled_range: f64, lag_capped: bool },
    Skipped,
}

/// Cumulative deviations from the window mean. The last entry is zero up to
/// rounding (the closure invariant of the profile).
pub fn profile(window: &[f64]) -> Vec<f64> {
    let n = window.len() as f64;
    let mean = window.iter().sum::<f64>() / n;
    let mut acc = 0.0;
    window
        .iter()
        .map(|&v| {
            acc += v - mean;
            acc
        })
        .collect()
}

/// The data-driven Bartlett lag for a window of length `scale` with
/// first-order autocorrelation `rho1`:
/// `ξ* = floor[ (3·scale/2)^(1/3) · (2ρ/(1−ρ²))^(2/3) ]` for `ρ > 0`, and 0
/// otherwise, capped at `scale − 1`. Returns the lag and whether the cap
/// (or the degenerate `ρ ≈ 1` branch) was hit.
pub fn lag_from_rho(rho1: f64, scale: usize) -> (usize, bool) {
    let cap = scale.saturating_sub(1);
    if !(rho1 > 0.0) {
        // Negative, zero, or NaN autocorrelation: no correction needed.
        return (0, false);
    }
    if rho1 >= 1.0 - 1e-12 {
        // Numerically degenerate window; the formula would blow up.
        return (cap, true);
    }
    let raw = (1.5 * scale as f64).cbrt() * (2.0 * rho1 / (1.0 - rho1 * rho1)).powf(2.0 / 3.0);
    let lag = raw.floor() as usize;
    if lag > cap {
        (cap, true)
    } else {
        (lag, false)
    }
}

fn window_mean_ss(window: &[f64]) -> (f64, f64) {
    let n = window.len() as f64;
    let mean = window.iter().sum::<f64>() / n;
    let mut ss = 0.0;
    for &v in window {
        let dev = v - mean;
        ss += dev * dev;
    }
    (mean, ss)
}

/// First-order autocorrelation of a window under the `1/υ` autocovariance
/// convention (`γ1/γ0`). Errors on windows shorter than two observations or
/// with zero dispersion.
pub fn rho1(window: &[f64]) -> Result<f64> {
    if window.len() < 2 {
        return Err(Error::InsufficientData {
            what: "autocorrelation window",
            required: 2,
            actual: window.len(),
        });
    }
    let (mean, ss) = window_mean_ss(window);
    if ss == 0.0 {
        return Err(Error::Estimation(
            "autocorrelation of a zero-dispersion window".into(),
        ));
    }
    if !ss.is_finite() {
        return Err(Error::Estimation(
            "autocorrelation overflowed on extreme values".into(),
        ));
    }
    let mut g1 = 0.0;
    for t in 1..window.len() {
        g1 += (window[t] - mean) * (window[t - 1] - mean);
    }
    Ok(g1 / ss)
}

/// The data-driven Bartlett lag of a window (see [`lag_from_rho`]).
pub fn optimal_lag(window: &[f64]) -> Result<(usize, bool)> {
    Ok(lag_from_rho(rho1(window)?, window.len()))
}

/// The modified standard deviation of a window at an explicit Bartlett lag:
/// `sqrt(S² + 2 Σ_{j=1..lag} (1 − j/(lag+1)) γ_j)` with `S²` and `γ_j` in
/// the `1/υ` convention. The lag must be smaller than the window length.
pub fn modified_std(window: &[f64], lag: usize) -> Result<f64> {
    if window.is_empty() || lag >= window.len() {
        return Err(Error::InvalidParameter {
            name: "lag",
            value: lag.to_string(),
            constraint: "must be smaller than the window length",
        });
    }
    let (mean, ss) = window_mean_ss(window);
    if !ss.is_finite() {
        return Err(Error::Estimation(
            "variance overflowed on extreme values".into(),
        ));
    }
    let n = window.len() as f64;
    let var = ss / n;
    let radicand = var + 2.0 * bartlett_sum(window, mean, lag);
    // The Bartlett weights form a Fejér kernel, so the radicand is a
    // non-negative quadratic form in exact arithmetic; anything beyond
    // rounding noise (measured relative to the variance) is a bug.
    if radicand < -1e-12 * var {
        return Err(Error::Internal(format!(
            "modified variance came out negative ({radicand:e} with variance {var:e})"
        )));
    }
    Ok(radicand.max(0.0).sqrt())
}

/// `Σ_{j=1..lag} (1 − j/(lag+1)) γ_j`; zero when `lag` is zero.
fn bartlett_sum(window: &[f64], mean: f64, lag: usize) -> f64 {
    let n = window.len() as f64;
    let mut total = 0.0;
    for j in 1..=lag {
        let mut g = 0.0;
        for t in j..window.len() {
            g += (window[t] - mean) * (window[t - j] - mean);
        }
        total += (1.0 - j as f64 / (lag as f64 + 1.0)) * (g / n);
    }
    total
}

/// Evaluate one window under a lag policy. Zero-dispersion windows and
/// windows whose statistics overflow are reported as skipped rather than
/// failing the whole series.
fn evaluate_window(window: &[f64], policy: LagPolicy) -> Result<WindowOutcome> {
    let n = window.len() as f64;
    let mean = window.iter().sum::<f64>() / n;

    // One fused pass: profile extremes and squared deviations. The profile
    // starts (implicitly) and ends (by closure) at zero, so both extremes
    // are anchored at zero.
    let mut acc = 0.0;
    let mut y_min = 0.0;
    let mut y_max = 0.0;
    let mut ss = 0.0;
    let mut g1 = 0.0;
    let mut prev_dev = 0.0;
    for (t, &v) in window.iter().enumerate() {
        let dev = v - mean;
        ss += dev * dev;
        if t > 0 {
            g1 += dev * prev_dev;
        }
        prev_dev = dev;
        acc += dev;
        if acc < y_min {
            y_min = acc;
        } else if acc > y_max {
            y_max = acc;
        }
    }
    if ss == 0.0 || !ss.is_finite() {
        return Ok(WindowOutcome::Skipped);
    }
    let range = y_max - y_min;
    if !range.is_finite() {
        return Ok(WindowOutcome::Skipped);
    }

    let var = ss / n;
    let (lag, lag_capped) = match policy {
        LagPolicy::Zero => (0, false),
        LagPolicy::Adaptive => lag_from_rho(g1 / ss, window.len()),
        LagPolicy::Fixed(k) => {
            let cap = window.len() - 1;
            if k > cap {
                (cap, true)
            } else {
                (k, false)
            }
        }
    };

    let radicand = var + 2.0 * bartlett_sum(window, mean, lag);
    if radicand < -1e-12 * var {
        return Err(Error::Internal(format!(
            "modified variance came out negative ({radicand:e} with variance {var:e})"
        )));
    }
    let denominator = radicand.max(0.0).sqrt();
    if denominator == 0.0 {
        return Ok(WindowOutcome::Skipped);
    }
    let rescaled_range = range / denominator;
    if !rescaled_range.is_finite() {
        return Ok(WindowOutcome::Skipped);
    }
    Ok(WindowOutcome::Value {
        rescaled_range,
        lag_capped,
    })
}

/// Full diagnostics for a single window under a method. Unlike the curve
/// functions, this errors on zero-dispersion or overflowing windows so the
/// caller learns *why* a window is unusable.
pub fn window_stats(window: &[f64], method: Method) -> Result<WindowStats> {
    if window.len() < 2 {
        return Err(Error::InsufficientData {
            what: "window",
            required: 2,
            actual: window.len(),
        });
    }
    let (mean, ss) = window_mean_ss(window);
    if ss == 0.0 {
        return Err(Error::Estimation("zero-dispersion window".into()));
    }
    if !ss.is_finite() {
        return Err(Error::Estimation(
            "window statistics overflowed on extreme values".into(),
        ));
    }
    let n = window.len() as f64;
    let std_dev = (ss / n).sqrt();
    let y = profile(window);
    let y_min = y.iter().cloned().fold(0.0_f64, f64::min);
    let y_max = y.iter().cloned().fold(0.0_f64, f64::max);
    let range = y_max - y_min;
    let rho = rho1(window)?;
    let (lag, lag_capped) = match method {
        Method::Rs => (0, false),
        Method::Mrs => lag_from_rho(rho, window.len()),
    };
    let denominator = modified_std(window, lag)?;
    if denominator == 0.0 {
        return Err(Error::Estimation(
            "rescaled range denominator vanished".into(),
        ));
    }
    Ok(WindowStats {
        mean,
        range,
        std_dev,
        rho1: rho,
        lag,
        lag_capped,
        denominator,
        rescaled_range: range / denominator,
    })
}

fn curve_with_policy(
    x: &IncrementSeries,
    grid: &ScaleGrid,
    method: Method,
    policy: LagPolicy,
    aggregation: ScaleAggregation,
) -> Result<RescaledRangeCurve> {
    let analyzed = grid.analyzed_len();
    if x.len() < analyzed {
        return Err(Error::InsufficientData {
            what: "series for scale grid",
            required: analyzed,
            actual: x.len(),
        });
    }
    let prefix = &x.values()[..analyzed];
    let mut points = Vec::with_capacity(grid.scales().len());
    let mut dropped_scales = Vec::new();
    for &scale in grid.scales() {
        let windows = analyzed / scale;
        let mut surviving = 0usize;
        let mut lag_capped = 0usize;
        let mut acc = 0.0;
        for window in prefix.chunks_exact(scale) {
            match evaluate_window(window, policy)? {
                WindowOutcome::Value {
                    rescaled_range,
                    lag_capped: capped,
                } => {
                    surviving += 1;
                    if capped {
                        lag_capped += 1;
                    }
                    acc += match aggregation {
                        ScaleAggregation::GeometricMean => rescaled_range.ln(),
                        ScaleAggregation::ArithmeticMean => rescaled_range,
                    };
                }
                WindowOutcome::Skipped => {}
            }
        }
        if surviving == 0 {
            dropped_scales.push(scale);
            continue;
        }
        let mean = acc / surviving as f64;
        let value = match aggregation {
            ScaleAggregation::GeometricMean => mean.exp(),
            ScaleAggregation::ArithmeticMean => mean,
        };
        points.push(ScalePoint {
            scale,
            value,
            windows,
            skipped: windows - surviving,
            lag_capped,
        });
    }
    Ok(RescaledRangeCurve {
        method,
        aggregation,
        points,
        dropped_scales,
        analyzed_len: analyzed,
    })
}

/// Rescaled range statistics per scale. [`Method::Rs`] uses the classical
/// denominator (equivalently, Bartlett lag pinned to zero); [`Method::Mrs`]
/// picks the lag per window from its autocorrelation.
pub fn rescaled_range_curve(
    x: &IncrementSeries,
    grid: &ScaleGrid,
    method: Method,
    aggregation: ScaleAggregation,
) -> Result<RescaledRangeCurve> {
    let policy = match method {
        Method::Rs => LagPolicy::Zero,
        Method::Mrs => LagPolicy::Adaptive,
    };
    curve_with_policy(x, grid, method, policy, aggregation)
}

/// The modified rescaled range curve at one externally chosen Bartlett lag
/// (capped per window at `scale − 1`). With `lag = 0` this reproduces the
/// classical curve exactly, bit for bit.
pub fn rescaled_range_curve_fixed_lag(
    x: &IncrementSeries,
    grid: &ScaleGrid,
    lag: usize,
    aggregation: ScaleAggregation,
) -> Result<RescaledRangeCurve> {
    curve_with_policy(x, grid, Method::Mrs, LagPolicy::Fixed(lag), aggregation)
}

/// Ordinary least squares of `ln value` on `ln scale`. Returns
/// `(slope, intercept, residual_ss)`.
pub(crate) fn fit_log_log(scales: &[usize], values: &[f64]) -> Result<(f64, f64, f64)> {
    if scales.len() != values.len() || scales.len() < 2 {
        return Err(Error::Estimation(format!(
            "log-log fit needs at least two scales, got {}",
            scales.len().min(values.len())
        )));
    }
    let n = scales.len() as f64;
    let xs: Vec<f64> = scales.iter().map(|&s| (s as f64).ln()).collect();
    let ys: Vec<f64> = values.iter().map(|&v| v.ln()).collect();
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - x_mean) * (x - x_mean);
        sxy += (x - x_mean) * (y - y_mean);
    }
    if sxx == 0.0 {
        return Err(Error::Estimation("log-log fit has no scale spread".into()));
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let mut rss = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        let r = y - (intercept + slope * x);
        rss += r * r;
    }
    Ok((slope, intercept, rss))
}

/// Fit a Hurst exponent to a curve: the slope of `ln value` against
/// `ln scale` over the surviving scales. Needs at least two points.
pub fn fit_hurst(curve: &RescaledRangeCurve) -> Result<HurstEstimate> {
    let scales: Vec<usize> = curve.points.iter().map(|p| p.scale).collect();
    let values: Vec<f64> = curve.points.iter().map(|p| p.value).collect();
    let (slope, intercept, residual_ss) = fit_log_log(&scales, &values).map_err(|_| {
        Error::Estimation(format!(
            "fewer than two usable scales survived (got {}, dropped {:?})",
            scales.len(),
            curve.dropped_scales
        ))
    })?;
    Ok(HurstEstimate {
        hurst: slope,
        intercept,
        method: curve.method,
        aggregation: curve.aggregation,
        scales,
        analyzed_len: curve.analyzed_len,
        residual_ss,
    })
}

/// Estimate the Hurst exponent of an increment series: dyadic grid from
/// `2^min_power`, rescaled range curve, log-log fit. The series is truncated
/// to its largest dyadic prefix; everything past it is ignored.
pub fn estimate_hurst_with(
    x: &IncrementSeries,
    method: Method,
    min_power: u32,
    aggregation: ScaleAggregation,
) -> Result<HurstEstimate> {
    let grid = ScaleGrid::dyadic(x.len(), min_power)?;
    let curve = rescaled_range_curve(x, &grid, method, aggregation)?;
    fit_hurst(&curve)
}

/// [`estimate_hurst_with`] under the default (geometric) aggregation.
pub fn estimate_hurst(x: &IncrementSeries, method: Method, min_power: u32) -> Result<HurstEstimate> {
    estimate_hurst_with(x, method, min_power, ScaleAggregation::GeometricMean)
}
