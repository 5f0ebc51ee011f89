//! Memory structures driven by innovation sequences.
//!
//! A [`ProcessSpec`] describes how innovations are turned into the increment
//! series handed to the estimators: passed through unchanged (`iid`), fed
//! through a first-order autoregression (`ar1`), or fed through a truncated
//! AR(∞) representation of a fractionally integrated process (`arfima`,
//! i.e. ARFIMA(0, d, 0)). Generation always produces `burn_in` extra leading
//! observations, discarded before the series is returned, so the retained
//! stretch has forgotten the zero initial state.

use crate::error::{Error, Result};
use std::ops::Deref;

/// Default number of leading observations generated and discarded.
pub const DEFAULT_BURN_IN: usize = 1000;

/// Default truncation depth of the ARFIMA AR(∞) representation.
pub const DEFAULT_ARFIMA_TRUNCATION: usize = 100;

/// The process family, with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProcessKind {
    /// Innovations pass through unchanged.
    Iid,
    /// `x_t = theta · x_{t−1} + ε_t`, started from zero pre-history.
    Ar1 { theta: f64 },
    /// Fractionally integrated noise of memory parameter `d`, generated
    /// through its AR(∞) representation truncated at `truncation` lags.
    Arfima { d: f64, truncation: usize },
}

/// A process plus the burn-in length used when generating from it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProcessSpec {
    kind: ProcessKind,
    burn_in: usize,
}

impl ProcessSpec {
    /// Independent draws (no memory).
    pub fn iid() -> Self {
        ProcessSpec {
            kind: ProcessKind::Iid,
            burn_in: DEFAULT_BURN_IN,
        }
    }

    /// First-order autoregression with coefficient `theta`, |theta| < 1.
    pub fn ar1(theta: f64) -> Result<Self> {
        if !(theta.is_finite() && theta.abs() < 1.0) {
            return Err(Error::InvalidParameter {
                name: "theta",
                value: theta.to_string(),
                constraint: "must satisfy |theta| < 1 for stationarity",
            });
        }
        Ok(ProcessSpec {
            kind: ProcessKind::Ar1 { theta },
            burn_in: DEFAULT_BURN_IN,
        })
    }

    /// ARFIMA(0, d, 0) with the default truncation depth.
    pub fn arfima(d: f64) -> Result<Self> {
        Self::arfima_with_truncation(d, DEFAULT_ARFIMA_TRUNCATION)
    }

    /// ARFIMA(0, d, 0) with an explicit truncation depth.
    pub fn arfima_with_truncation(d: f64, truncation: usize) -> Result<Self> {
        if !(d.is_finite() && d != 0.0 && d.abs() < 0.5) {
            return Err(Error::InvalidParameter {
                name: "d",
                value: d.to_string(),
                constraint: "must satisfy 0 < |d| < 0.5",
            });
        }
        if truncation == 0 {
            return Err(Error::InvalidParameter {
                name: "truncation",
                value: truncation.to_string(),
                constraint: "must be at least 1",
            });
        }
        Ok(ProcessSpec {
            kind: ProcessKind::Arfima { d, truncation },
            burn_in: DEFAULT_BURN_IN,
        })
    }

    /// Replace the burn-in length.
    pub fn with_burn_in(mut self, burn_in: usize) -> Self {
        self.burn_in = burn_in;
        self
    }

    /// The process family name: `iid`, `ar1`, or `arfima`.
    pub fn name(&self) -> &'static str {
        match self.kind {
            ProcessKind::Iid => "iid",
            ProcessKind::Ar1 { .. } => "ar1",
            ProcessKind::Arfima { .. } => "arfima",
        }
    }

    /// The kind, with parameters.
    pub fn kind(&self) -> ProcessKind {
        self.kind
    }

    /// The burn-in length.
    pub fn burn_in(&self) -> usize {
        self.burn_in
    }

    /// Canonical label naming the process and its parameters. Primary
    /// parameters always appear; secondary ones (truncation, burn-in) appear
    /// only when they differ from the defaults, so the label for a given
    /// spec never depends on how it was constructed. Random streams and
    /// report rows are keyed on this.
    pub fn label(&self) -> String {
        let mut parts: Vec<String> = Vec::new();
        match self.kind {
            ProcessKind::Iid => {}
            ProcessKind::Ar1 { theta } => parts.push(format!("theta={theta}")),
            ProcessKind::Arfima { d, truncation } => {
                parts.push(format!("d={d}"));
                if truncation != DEFAULT_ARFIMA_TRUNCATION {
                    parts.push(format!("truncation={truncation}"));
                }
            }
        }
        if self.burn_in != DEFAULT_BURN_IN {
            parts.push(format!("burn-in={}", self.burn_in));
        }
        if parts.is_empty() {
            self.name().to_string()
        } else {
            format!("{}({})", self.name(), parts.join(","))
        }
    }

    /// The Hurst exponent this process converges to asymptotically: 0.5 for
    /// short-memory processes, d + 0.5 for fractionally integrated noise.
    pub fn asymptotic_hurst(&self) -> f64 {
        match self.kind {
            ProcessKind::Iid | ProcessKind::Ar1 { .. } => 0.5,
            ProcessKind::Arfima { d, .. } => d + 0.5,
        }
    }
}

/// AR(∞) weights `a_1 … a_max_lag` of an ARFIMA(0, d, 0) process:
/// `a_i = d · Γ(i − d) / (Γ(1 − d) · Γ(1 + i))`.
///
/// Evaluated in log-gamma space so that large lags neither overflow nor
/// round through enormous intermediate gamma values; only the sign of `d`
/// survives outside the logs.
pub fn arfima_weights(d: f64, max_lag: usize) -> Result<Vec<f64>> {
    if !(d.is_finite() && d != 0.0 && d.abs() < 0.5) {
        return Err(Error::InvalidParameter {
            name: "d",
            value: d.to_string(),
            constraint: "must satisfy 0 < |d| < 0.5",
        });
    }
    let sign = d.signum();
    let ln_abs_d = d.abs().ln();
    let ln_gamma_1_minus_d = libm::lgamma(1.0 - d);
    let mut weights = Vec::with_capacity(max_lag);
    for i in 1..=max_lag {
        let i_f = i as f64;
        let ln_w = ln_abs_d + libm::lgamma(i_f - d) - ln_gamma_1_minus_d - libm::lgamma(i_f + 1.0);
        weights.push(sign * ln_w.exp());
    }
    Ok(weights)
}

/// A validated increment series: non-empty, every value finite.
#[derive(Debug, Clone, PartialEq)]
pub struct IncrementSeries {
    values: Vec<f64>,
}

impl IncrementSeries {
    /// Validate and wrap a raw series.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InsufficientData {
                what: "increment series",
                required: 1,
                actual: 0,
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(IncrementSeries { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

impl Deref for IncrementSeries {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.values
    }
}

/// A level (cumulated) series; always starts at exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSeries {
    values: Vec<f64>,
}

impl LevelSeries {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// First differences, which recover the increments the levels were built
    /// from (up to floating-point rounding).
    pub fn increments(&self) -> Result<IncrementSeries> {
        increments_from_levels(&self.values)
    }
}

/// Cumulate increments into levels anchored at `X_0 = 0`; the result has one
/// more observation than the input.
pub fn integrate(increments: &IncrementSeries) -> LevelSeries {
    let mut values = Vec::with_capacity(increments.len() + 1);
    values.push(0.0);
    let mut acc = 0.0;
    for x in increments.values() {
        acc += x;
        values.push(acc);
    }
    LevelSeries { values }
}

/// First differences of a level series (at least two observations). The
/// error index of a non-finite difference refers to the position in the
/// resulting increment series.
pub fn increments_from_levels(levels: &[f64]) -> Result<IncrementSeries> {
    if levels.len() < 2 {
        return Err(Error::InsufficientData {
            what: "level series",
            required: 2,
            actual: levels.len(),
        });
    }
    let diffs: Vec<f64> = levels.windows(2).map(|w| w[1] - w[0]).collect();
    IncrementSeries::new(diffs)
}

/// A process spec with its ARFIMA weights precomputed, ready to transform
/// innovation sequences. Cheap to share across replications (and threads).
#[derive(Debug, Clone)]
pub struct ProcessGenerator {
    spec: ProcessSpec,
    weights: Vec<f64>,
}

impl ProcessGenerator {
    pub fn new(spec: ProcessSpec) -> Result<Self> {
        let weights = match spec.kind {
            ProcessKind::Arfima { d, truncation } => arfima_weights(d, truncation)?,
            _ => Vec::new(),
        };
        Ok(ProcessGenerator { spec, weights })
    }

    pub fn spec(&self) -> &ProcessSpec {
        &self.spec
    }

    /// Number of innovations needed to produce `t` retained observations.
    pub fn innovations_needed(&self, t: usize) -> usize {
        t + self.spec.burn_in
    }

    /// Transform innovations into an increment series of length
    /// `innovations.len() − burn_in` (the burn-in prefix is generated and
    /// discarded).
    pub fn generate(&self, innovations: &[f64]) -> Result<IncrementSeries> {
        let burn = self.spec.burn_in;
        if innovations.len() <= burn {
            return Err(Error::InsufficientData {
                what: "innovations (after burn-in)",
                required: burn + 1,
                actual: innovations.len(),
            });
        }
        let total = innovations.len();
        let values = match self.spec.kind {
            ProcessKind::Iid => innovations[burn..].to_vec(),
            ProcessKind::Ar1 { theta } => {
                let mut x = Vec::with_capacity(total);
                let mut prev = 0.0;
                for &eps in innovations {
                    let cur = theta * prev + eps;
                    x.push(cur);
                    prev = cur;
                }
                x.drain(..burn);
                x
            }
            ProcessKind::Arfima { .. } => {
                let w = &self.weights;
                let mut x = Vec::with_capacity(total);
                for (t, &eps) in innovations.iter().enumerate() {
                    let depth = t.min(w.len());
                    let mut acc = eps;
                    for i in 1..=depth {
                        acc += w[i - 1] * x[t - i];
                    }
                    x.push(acc);
                }
                x.drain(..burn);
                x
            }
        };
        IncrementSeries::new(values)
    }
}

/// One-shot convenience over [`ProcessGenerator`].
pub fn generate_increments(spec: &ProcessSpec, innovations: &[f64]) -> Result<IncrementSeries> {
    ProcessGenerator::new(*spec)?.generate(innovations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::DistributionSpec;
    use crate::stream::RandomStream;
    use approx::assert_relative_eq;

    #[test]
    fn validation() {
        assert!(ProcessSpec::ar1(1.0).is_err());
        assert!(ProcessSpec::ar1(-1.5).is_err());
        assert!(ProcessSpec::ar1(f64::NAN).is_err());
        assert!(ProcessSpec::arfima(0.0).is_err());
        assert!(ProcessSpec::arfima(0.5).is_err());
        assert!(ProcessSpec::arfima_with_truncation(0.25, 0).is_err());
        assert!(ProcessSpec::ar1(0.25).is_ok());
        assert!(ProcessSpec::arfima(-0.25).is_ok());
    }

    #[test]
    fn labels() {
        assert_eq!(ProcessSpec::iid().label(), "iid");
        assert_eq!(ProcessSpec::ar1(0.25).unwrap().label(), "ar1(theta=0.25)");
        assert_eq!(ProcessSpec::arfima(0.25).unwrap().label(), "arfima(d=0.25)");
        assert_eq!(
            ProcessSpec::arfima_with_truncation(0.25, 50).unwrap().label(),
            "arfima(d=0.25,truncation=50)"
        );
        assert_eq!(ProcessSpec::iid().with_burn_in(0).label(), "iid(burn-in=0)");
    }

    #[test]
    fn asymptotic_hurst() {
        assert_eq!(ProcessSpec::iid().asymptotic_hurst(), 0.5);
        assert_eq!(ProcessSpec::ar1(0.25).unwrap().asymptotic_hurst(), 0.5);
        assert_eq!(ProcessSpec::arfima(0.25).unwrap().asymptotic_hurst(), 0.75);
    }

    #[test]
    fn integrate_example() {
        let x = IncrementSeries::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(integrate(&x).values(), &[0.0, 1.0, 3.0, 6.0]);
    }

    #[test]
    fn increment_series_validation() {
        assert!(IncrementSeries::new(vec![]).is_err());
        match IncrementSeries::new(vec![0.0, f64::NAN, 1.0]) {
            Err(Error::NonFinite { index }) => assert_eq!(index, 1),
            other => panic!("expected NonFinite, got {other:?}"),
        }
        assert!(increments_from_levels(&[1.0]).is_err());
        assert_eq!(
            increments_from_levels(&[0.0, 1.0, 3.0, 6.0]).unwrap().values(),
            &[1.0, 2.0, 3.0]
        );
    }

    #[test]
    fn ar1_impulse_response() {
        // With a unit impulse and zero pre-history the response is theta^t;
        // every value below is exactly representable.
        let spec = ProcessSpec::ar1(0.25).unwrap().with_burn_in(0);
        let x = generate_increments(&spec, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(x.values(), &[1.0, 0.25, 0.0625, 0.015625]);
    }

    #[test]
    fn ar1_variance_matches_theory() {
        // Var of a stationary AR(1) on unit-variance innovations is
        // 1/(1 − theta²) ≈ 1.0667 at theta = 0.25.
        let spec = ProcessSpec::ar1(0.25).unwrap();
        let mut stream = RandomStream::derive(11, "ar1-var", 0);
        let eps = DistributionSpec::normal().sample(201_000, &mut stream);
        let x = generate_increments(&spec, &eps).unwrap();
        let n = x.len() as f64;
        let mean = x.iter().sum::<f64>() / n;
        let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        assert!((var - 1.0 / (1.0 - 0.0625)).abs() < 0.02, "var {var}");
    }

    #[test]
    fn arfima_weight_identities() {
        let d = 0.25;
        let w = arfima_weights(d, 4).unwrap();
        assert_relative_eq!(w[0], d, max_relative = 1e-13);
        assert_relative_eq!(w[1], d * (1.0 - d) / 2.0, max_relative = 1e-13);
    }

    #[test]
    fn arfima_weights_match_ratio_recurrence() {
        // Independent check: successive weights obey
        // a_{i+1} = a_i (i − d)/(i + 1), starting from a_1 = d.
        for d in [0.25, -0.3, 0.45] {
            let w = arfima_weights(d, 100).unwrap();
            let mut expected = d;
            assert_relative_eq!(w[0], expected, max_relative = 1e-12);
            for i in 1..100 {
                expected *= (i as f64 - d) / (i as f64 + 1.0);
                assert_relative_eq!(w[i], expected, max_relative = 1e-12, epsilon = 1e-300);
            }
        }
    }

    #[test]
    fn arfima_weights_decay_for_positive_d() {
        let w = arfima_weights(0.25, 100).unwrap();
        for pair in w.windows(2) {
            assert!(pair[1] < pair[0] && pair[1] > 0.0);
        }
    }

    #[test]
    fn arfima_generation_matches_direct_convolution() {
        let d = 0.25;
        let trunc = 10;
        let spec = ProcessSpec::arfima_with_truncation(d, trunc).unwrap().with_burn_in(16);
        let mut stream = RandomStream::derive(3, "arfima-conv", 0);
        let eps = DistributionSpec::normal().sample(80, &mut stream);
        let got = generate_increments(&spec, &eps).unwrap();

        // Re-derive with recurrence weights and an explicit double loop.
        let mut w = vec![d];
        for i in 1..trunc {
            let prev = w[i - 1];
            w.push(prev * (i as f64 - d) / (i as f64 + 1.0));
        }
        let mut x: Vec<f64> = Vec::new();
        for t in 0..eps.len() {
            let mut acc = eps[t];
            for i in 1..=t.min(trunc) {
                acc += w[i - 1] * x[t - i];
            }
            x.push(acc);
        }
        for (a, b) in got.values().iter().zip(&x[16..]) {
            assert_relative_eq!(a, b, max_relative = 1e-12);
        }
    }

    #[test]
    fn burn_in_is_discarded() {
        let spec = ProcessSpec::iid().with_burn_in(3);
        let x = generate_increments(&spec, &[9.0, 9.0, 9.0, 1.0, 2.0]).unwrap();
        assert_eq!(x.values(), &[1.0, 2.0]);
        assert!(generate_increments(&spec, &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn generator_reports_innovation_count() {
        let g = ProcessGenerator::new(ProcessSpec::iid()).unwrap();
        assert_eq!(g.innovations_needed(512), 512 + DEFAULT_BURN_IN);
    }
}
