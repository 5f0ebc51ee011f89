//! Innovation distributions.
//!
//! The eight distributions cover a deliberate progression of tail weight and
//! asymmetry: the normal as the well-behaved reference; the shifted
//! log-normal and shifted gamma with all four moments finite but visible
//! skew; the Laplace with heavy (yet sub-exponential) symmetric tails; the
//! shifted inverse gamma whose fourth moment no longer exists; the shifted
//! log-Laplace with infinite variance; the shifted log-t with no finite
//! moments at all; and the Cauchy, whose mean is not even defined.
//!
//! Each transformed kind draws a base variate, applies its transformation,
//! and subtracts a `shift` (1 by default for the transformed kinds, so the
//! bulk of the distribution sits near zero; 0 for the symmetric kinds). For
//! every kind, `sample` with shift `s` equals `sample` with shift 0 minus
//! `s`, element for element.

use crate::error::{Error, Result};
use crate::stream::RandomStream;
use rand::Rng;
use rand_distr::{Distribution as _, Open01, StandardNormal};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// A possibly non-existent moment.
///
/// `Value` carries a finite moment. `Infinite` marks a moment whose defining
/// integral diverges to +∞ (heavy one-sided or symmetric-even cases), and
/// `Undefined` marks one whose integral has no value at all (for example the
/// Cauchy mean) or a standardized ratio whose defining moment does not
/// exist.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Moment {
    Value(f64),
    Infinite,
    Undefined,
}

impl Moment {
    /// The finite value, if there is one.
    pub fn value(self) -> Option<f64> {
        match self {
            Moment::Value(v) => Some(v),
            _ => None,
        }
    }
}

/// Theoretical mean, standard deviation, skewness, and excess kurtosis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSummary {
    pub mean: Moment,
    pub std_dev: Moment,
    pub skewness: Moment,
    pub excess_kurtosis: Moment,
}

/// The distribution family, with its shape parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistributionKind {
    /// Standard normal.
    Normal,
    /// `exp(N) - shift` with `N` standard normal.
    LogNormal,
    /// Cauchy with the given scale (median 0).
    Cauchy { scale: f64 },
    /// `exp(T) - shift` with `T` Student-t on `dof` degrees of freedom.
    LogT { dof: f64 },
    /// Gamma with the given shape and scale, minus `shift`.
    Gamma { shape: f64, scale: f64 },
    /// Reciprocal of a Gamma(shape, scale) variate, minus `shift`.
    InvGamma { shape: f64, scale: f64 },
    /// Laplace with unit variance (scale 1/√2).
    Laplace,
    /// `exp(L) - shift` with `L` the unit-variance Laplace above.
    LogLaplace,
}

/// A fully specified innovation distribution: a kind plus the shift
/// subtracted from every draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributionSpec {
    kind: DistributionKind,
    shift: f64,
}

/// Names accepted by [`DistributionSpec::from_name`], in canonical order.
pub const DISTRIBUTION_NAMES: [&str; 8] = [
    "normal",
    "log-normal",
    "cauchy",
    "log-t",
    "gamma",
    "inv-gamma",
    "laplace",
    "log-laplace",
];

/// Default degrees of freedom for the log-t kind.
pub const DEFAULT_LOG_T_DOF: f64 = 5.0;
/// Default shape for the gamma and inverse-gamma kinds.
pub const DEFAULT_GAMMA_SHAPE: f64 = 4.0;
/// Default scale for the gamma and inverse-gamma kinds.
pub const DEFAULT_GAMMA_SCALE: f64 = 0.25;
/// Default scale for the Cauchy kind.
pub const DEFAULT_CAUCHY_SCALE: f64 = 1.0;

/// Laplace scale giving unit variance (variance of Laplace(0, b) is 2b²).
const LAPLACE_SCALE: f64 = FRAC_1_SQRT_2;

fn require_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value: value.to_string(),
            constraint: "must be a finite positive number",
        })
    }
}

impl DistributionSpec {
    fn new(kind: DistributionKind) -> Self {
        let shift = match kind {
            DistributionKind::Normal | DistributionKind::Cauchy { .. } | DistributionKind::Laplace => 0.0,
            _ => 1.0,
        };
        DistributionSpec { kind, shift }
    }

    /// Standard normal (shift 0).
    pub fn normal() -> Self {
        Self::new(DistributionKind::Normal)
    }

    /// Shifted log-normal `exp(N) - 1`.
    pub fn log_normal() -> Self {
        Self::new(DistributionKind::LogNormal)
    }

    /// Cauchy with the given scale.
    pub fn cauchy(scale: f64) -> Result<Self> {
        require_positive("scale", scale)?;
        Ok(Self::new(DistributionKind::Cauchy { scale }))
    }

    /// Shifted log-t `exp(T) - 1` on `dof` degrees of freedom.
    pub fn log_t(dof: f64) -> Result<Self> {
        require_positive("dof", dof)?;
        Ok(Self::new(DistributionKind::LogT { dof }))
    }

    /// Shifted gamma `Gamma(shape, scale) - 1`.
    pub fn gamma(shape: f64, scale: f64) -> Result<Self> {
        require_positive("shape", shape)?;
        require_positive("scale", scale)?;
        Ok(Self::new(DistributionKind::Gamma { shape, scale }))
    }

    /// Shifted inverse gamma `1 / Gamma(shape, scale) - 1`.
    pub fn inv_gamma(shape: f64, scale: f64) -> Result<Self> {
        require_positive("shape", shape)?;
        require_positive("scale", scale)?;
        Ok(Self::new(DistributionKind::InvGamma { shape, scale }))
    }

    /// Unit-variance Laplace (shift 0).
    pub fn laplace() -> Self {
        Self::new(DistributionKind::Laplace)
    }

    /// Shifted log-Laplace `exp(L) - 1`.
    pub fn log_laplace() -> Self {
        Self::new(DistributionKind::LogLaplace)
    }

    /// Replace the shift subtracted from every draw.
    pub fn with_shift(mut self, shift: f64) -> Result<Self> {
        if !shift.is_finite() {
            return Err(Error::InvalidParameter {
                name: "shift",
                value: shift.to_string(),
                constraint: "must be finite",
            });
        }
        self.shift = shift;
        Ok(self)
    }

    /// Look up a distribution by its canonical name with default parameters.
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "normal" => Ok(Self::normal()),
            "log-normal" => Ok(Self::log_normal()),
            "cauchy" => Self::cauchy(DEFAULT_CAUCHY_SCALE),
            "log-t" => Self::log_t(DEFAULT_LOG_T_DOF),
            "gamma" => Self::gamma(DEFAULT_GAMMA_SHAPE, DEFAULT_GAMMA_SCALE),
            "inv-gamma" => Self::inv_gamma(DEFAULT_GAMMA_SHAPE, DEFAULT_GAMMA_SCALE),
            "laplace" => Ok(Self::laplace()),
            "log-laplace" => Ok(Self::log_laplace()),
            other => Err(Error::Config(format!(
                "unknown distribution `{other}` (expected one of: {})",
                DISTRIBUTION_NAMES.join(", ")
            ))),
        }
    }

    /// All eight distributions with default parameters, in canonical order.
    pub fn all_defaults() -> Vec<Self> {
        DISTRIBUTION_NAMES
            .iter()
            .map(|n| Self::from_name(n).expect("canonical names are valid"))
            .collect()
    }

    /// The canonical family name (the same string accepted by
    /// [`from_name`](Self::from_name)).
    pub fn name(&self) -> &'static str {
        match self.kind {
            DistributionKind::Normal => "normal",
            DistributionKind::LogNormal => "log-normal",
            DistributionKind::Cauchy { .. } => "cauchy",
            DistributionKind::LogT { .. } => "log-t",
            DistributionKind::Gamma { .. } => "gamma",
            DistributionKind::InvGamma { .. } => "inv-gamma",
            DistributionKind::Laplace => "laplace",
            DistributionKind::LogLaplace => "log-laplace",
        }
    }

    /// The kind, with parameters.
    pub fn kind(&self) -> DistributionKind {
        self.kind
    }

    /// The shift subtracted from every draw.
    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// Canonical label naming the distribution *and* all of its parameters.
    /// Random streams are keyed on this, so two specs produce the same label
    /// exactly when they are the same distribution.
    pub fn label(&self) -> String {
        let mut parts: Vec<String> = Vec::new();
        match self.kind {
            DistributionKind::Normal | DistributionKind::LogNormal | DistributionKind::Laplace | DistributionKind::LogLaplace => {}
            DistributionKind::Cauchy { scale } => parts.push(format!("scale={scale}")),
            DistributionKind::LogT { dof } => parts.push(format!("dof={dof}")),
            DistributionKind::Gamma { shape, scale } | DistributionKind::InvGamma { shape, scale } => {
                parts.push(format!("shape={shape}"));
                parts.push(format!("scale={scale}"));
            }
        }
        let default_shift = Self::new(self.kind).shift;
        if self.shift != default_shift {
            parts.push(format!("shift={}", self.shift));
        }
        if parts.is_empty() {
            self.name().to_string()
        } else {
            format!("{}({})", self.name(), parts.join(","))
        }
    }

    /// Draw `n` innovations from the stream.
    ///
    /// Draws are raw variates minus the shift; no clipping or rejection is
    /// applied, so heavy-tailed kinds can legitimately produce enormous
    /// values. An overflow to infinity (possible only through `exp` of an
    /// astronomically unlikely tail draw) is left in place for downstream
    /// validation to flag.
    pub fn sample(&self, n: usize, stream: &mut RandomStream) -> Vec<f64> {
        let shift = self.shift;
        let mut out = Vec::with_capacity(n);
        match self.kind {
            DistributionKind::Normal => {
                for _ in 0..n {
                    let z: f64 = stream.sample(StandardNormal);
                    out.push(z - shift);
                }
            }
            DistributionKind::LogNormal => {
                for _ in 0..n {
                    let z: f64 = stream.sample(StandardNormal);
                    out.push(z.exp() - shift);
                }
            }
            DistributionKind::Cauchy { scale } => {
                // Inverse CDF: tan(π(u − 1/2)) with u in the open interval,
                // so the argument stays strictly inside (−π/2, π/2).
                for _ in 0..n {
                    let u: f64 = stream.sample(Open01);
                    out.push(scale * (PI * (u - 0.5)).tan() - shift);
                }
            }
            DistributionKind::LogT { dof } => {
                let t = rand_distr::StudentT::new(dof).expect("dof validated at construction");
                for _ in 0..n {
                    let draw: f64 = t.sample(stream);
                    out.push(draw.exp() - shift);
                }
            }
            DistributionKind::Gamma { shape, scale } => {
                let g = rand_distr::Gamma::new(shape, scale).expect("parameters validated at construction");
                for _ in 0..n {
                    let draw: f64 = g.sample(stream);
                    out.push(draw - shift);
                }
            }
            DistributionKind::InvGamma { shape, scale } => {
                let g = rand_distr::Gamma::new(shape, scale).expect("parameters validated at construction");
                for _ in 0..n {
                    let draw: f64 = g.sample(stream);
                    out.push(draw.recip() - shift);
                }
            }
            DistributionKind::Laplace => {
                for _ in 0..n {
                    out.push(laplace_draw(stream) - shift);
                }
            }
            DistributionKind::LogLaplace => {
                for _ in 0..n {
                    out.push(laplace_draw(stream).exp() - shift);
                }
            }
        }
        out
    }

    /// Theoretical moments of the shifted distribution.
    ///
    /// The shift moves only the mean; dispersion and shape are unaffected.
    /// Where a moment's defining integral diverges the summary reports
    /// [`Moment::Infinite`]; where the moment needed to standardize a ratio
    /// does not exist, the ratio is [`Moment::Undefined`].
    pub fn theoretical_moments(&self) -> MomentSummary {
        let shift = self.shift;
        match self.kind {
            DistributionKind::Normal => MomentSummary {
                mean: Moment::Value(-shift),
                std_dev: Moment::Value(1.0),
                skewness: Moment::Value(0.0),
                excess_kurtosis: Moment::Value(0.0),
            },
            DistributionKind::LogNormal => {
                // Log-normal with log-scale σ = 1.
                let e = std::f64::consts::E;
                MomentSummary {
                    mean: Moment::Value(e.sqrt() - shift),
                    std_dev: Moment::Value(((e - 1.0) * e).sqrt()),
                    skewness: Moment::Value((e + 2.0) * (e - 1.0).sqrt()),
                    excess_kurtosis: Moment::Value(
                        e.powi(4) + 2.0 * e.powi(3) + 3.0 * e.powi(2) - 6.0,
                    ),
                }
            }
            DistributionKind::Cauchy { .. } => MomentSummary {
                mean: Moment::Undefined,
                std_dev: Moment::Infinite,
                skewness: Moment::Undefined,
                excess_kurtosis: Moment::Undefined,
            },
            DistributionKind::LogT { .. } => MomentSummary {
                // exp of a t variate has no finite moments of any order: the
                // right tail decays only polynomially in log-space.
                mean: Moment::Infinite,
                std_dev: Moment::Infinite,
                skewness: Moment::Infinite,
                excess_kurtosis: Moment::Infinite,
            },
            DistributionKind::Gamma { shape, scale } => MomentSummary {
                mean: Moment::Value(shape * scale - shift),
                std_dev: Moment::Value(shape.sqrt() * scale),
                skewness: Moment::Value(2.0 / shape.sqrt()),
                excess_kurtosis: Moment::Value(6.0 / shape),
            },
            DistributionKind::InvGamma { shape, scale } => {
                // 1/Gamma(k, θ) is inverse-gamma with shape k and scale 1/θ.
                let k = shape;
                let b = scale.recip();
                let mean = if k > 1.0 {
                    Moment::Value(b / (k - 1.0) - shift)
                } else {
                    Moment::Infinite
                };
                let std_dev = if k > 2.0 {
                    Moment::Value(b / ((k - 1.0) * (k - 2.0).sqrt()))
                } else {
                    Moment::Infinite
                };
                let skewness = if k > 3.0 {
                    Moment::Value(4.0 * (k - 2.0).sqrt() / (k - 3.0))
                } else {
                    Moment::Undefined
                };
                let excess_kurtosis = if k > 4.0 {
                    Moment::Value((30.0 * k - 66.0) / ((k - 3.0) * (k - 4.0)))
                } else {
                    Moment::Undefined
                };
                MomentSummary {
                    mean,
                    std_dev,
                    skewness,
                    excess_kurtosis,
                }
            }
            DistributionKind::Laplace => MomentSummary {
                mean: Moment::Value(-shift),
                std_dev: Moment::Value(1.0),
                skewness: Moment::Value(0.0),
                excess_kurtosis: Moment::Value(3.0),
            },
            DistributionKind::LogLaplace => {
                // E[exp(L)] = 1/(1 − b²) for b < 1; with b² = 1/2 that is 2.
                // The second exponential moment needs b < 1/2, which fails,
                // so the variance (and everything above it) diverges.
                MomentSummary {
                    mean: Moment::Value(2.0 - shift),
                    std_dev: Moment::Infinite,
                    skewness: Moment::Infinite,
                    excess_kurtosis: Moment::Infinite,
                }
            }
        }
    }
}

/// One draw from the unit-variance Laplace via the inverse CDF. `Open01`
/// keeps `u` strictly inside (0, 1), so both logarithms are finite.
fn laplace_draw(stream: &mut RandomStream) -> f64 {
    let u: f64 = stream.sample(Open01);
    if u < 0.5 {
        LAPLACE_SCALE * (2.0 * u).ln()
    } else {
        -LAPLACE_SCALE * (2.0 * (1.0 - u)).ln()
    }
}
