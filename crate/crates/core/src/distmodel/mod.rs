//! Parametric distribution models: quantile, density, moments, kurtosis
//! inversion, and inverse-CDF sample generation (Sobol or seeded PRNG).
//!
//! Every family is a location-scale transform of a standard member,
//! `Q(p) = location + scale * Q0(p)`. Quantiles are evaluated through a
//! lower-tail and an upper-tail branch so that probabilities near 1 keep
//! full relative precision (`quantile_upper(q)` is `Q(1 - q)` without forming
//! `1 - q`).

mod sample;
mod sobol;
mod sobol_table;
mod special;

pub use sample::{draw_sample, Provenance, SampleMode, SampleVector};
pub(crate) use sample::rng as sample_rng;
pub use sobol::{sobol_sequence, SobolStream, SOBOL_MAX_DIM, SOBOL_TABLE_VERSION};

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use statrs::function::gamma::ln_gamma;

use crate::error::{domain, param, Error, Result};
use crate::numeric;
use special::{gamma_inv_lower, gamma_inv_upper, normal_cdf, normal_lower, normal_upper};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Exponential,
    Weibull,
    Gamma,
    Lognormal,
    Pareto,
    Gaussian,
    GeneralizedGaussian,
    Uniform,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::Exponential,
        Family::Weibull,
        Family::Gamma,
        Family::Lognormal,
        Family::Pareto,
        Family::Gaussian,
        Family::GeneralizedGaussian,
        Family::Uniform,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Exponential => "exponential",
            Family::Weibull => "weibull",
            Family::Gamma => "gamma",
            Family::Lognormal => "lognormal",
            Family::Pareto => "pareto",
            Family::Gaussian => "gaussian",
            Family::GeneralizedGaussian => "generalized_gaussian",
            Family::Uniform => "uniform",
        }
    }

    /// Whether the family carries a free shape parameter.
    pub fn has_shape(self) -> bool {
        matches!(
            self,
            Family::Weibull
                | Family::Gamma
                | Family::Lognormal
                | Family::Pareto
                | Family::GeneralizedGaussian
        )
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "exponential" | "exp" => Family::Exponential,
            "weibull" => Family::Weibull,
            "gamma" => Family::Gamma,
            "lognormal" => Family::Lognormal,
            "pareto" => Family::Pareto,
            "gaussian" | "normal" => Family::Gaussian,
            "generalized_gaussian" | "gengauss" => Family::GeneralizedGaussian,
            "uniform" => Family::Uniform,
            other => return Err(param(format!("unknown family '{other}'"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSummary {
    pub mean: f64,
    pub sd: f64,
    pub skewness: f64,
    /// Non-excess kurtosis (3 for the Gaussian).
    pub kurtosis: f64,
}

/// Anything with a quantile function: parametric specs, tabulated quantiles.
/// `quantile_upper(q)` is Q(1 − q), accurate for small q.
pub trait QuantileModel: Sync {
    fn quantile(&self, p: f64) -> Result<f64>;
    fn quantile_upper(&self, q: f64) -> Result<f64>;
}

impl QuantileModel for DistributionSpec {
    fn quantile(&self, p: f64) -> Result<f64> {
        DistributionSpec::quantile(self, p)
    }

    fn quantile_upper(&self, q: f64) -> Result<f64> {
        DistributionSpec::quantile_upper(self, q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributionSpec {
    family: Family,
    shape: f64,
    scale: f64,
    location: f64,
}

impl DistributionSpec {
    /// `shape` is α (weibull, gamma, pareto), β (generalized gaussian) or the
    /// log-scale sd (lognormal); it is ignored by shape-free families.
    pub fn new(family: Family, shape: f64, scale: f64, location: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(param(format!("scale must be positive and finite, got {scale}")));
        }
        if !location.is_finite() {
            return Err(param("location must be finite"));
        }
        let shape = if family.has_shape() {
            if !(shape > 0.0 && shape.is_finite()) {
                return Err(param(format!("{family} shape must be positive, got {shape}")));
            }
            shape
        } else {
            1.0
        };
        Ok(Self { family, shape, scale, location })
    }

    pub fn exponential(lambda: f64) -> Result<Self> {
        Self::new(Family::Exponential, 1.0, lambda, 0.0)
    }
    pub fn weibull(alpha: f64, lambda: f64) -> Result<Self> {
        Self::new(Family::Weibull, alpha, lambda, 0.0)
    }
    pub fn gamma(alpha: f64, lambda: f64) -> Result<Self> {
        Self::new(Family::Gamma, alpha, lambda, 0.0)
    }
    pub fn lognormal(sdlog: f64, scale: f64) -> Result<Self> {
        Self::new(Family::Lognormal, sdlog, scale, 0.0)
    }
    pub fn pareto(alpha: f64, x_m: f64) -> Result<Self> {
        Self::new(Family::Pareto, alpha, x_m, 0.0)
    }
    pub fn gaussian(mu: f64, sigma: f64) -> Result<Self> {
        Self::new(Family::Gaussian, 1.0, sigma, mu)
    }
    pub fn generalized_gaussian(beta: f64, scale: f64, mu: f64) -> Result<Self> {
        Self::new(Family::GeneralizedGaussian, beta, scale, mu)
    }
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        Self::new(Family::Uniform, 1.0, hi - lo, lo)
    }

    pub fn family(&self) -> Family {
        self.family
    }
    pub fn shape(&self) -> f64 {
        self.shape
    }
    pub fn scale(&self) -> f64 {
        self.scale
    }
    pub fn location(&self) -> f64 {
        self.location
    }

    /// The law of `lambda * X + mu`.
    pub fn affine(&self, lambda: f64, mu: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(param("affine factor must be positive"));
        }
        Self::new(self.family, self.shape, self.scale * lambda, self.location * lambda + mu)
    }

    /// Support of the distribution (may be infinite on either side).
    pub fn support(&self) -> (f64, f64) {
        let (lo, hi) = match self.family {
            Family::Exponential | Family::Weibull | Family::Gamma | Family::Lognormal => {
                (0.0, f64::INFINITY)
            }
            Family::Pareto => (1.0, f64::INFINITY),
            Family::Gaussian | Family::GeneralizedGaussian => (f64::NEG_INFINITY, f64::INFINITY),
            Family::Uniform => (0.0, 1.0),
        };
        (self.location + self.scale * lo, self.location + self.scale * hi)
    }

    // Standard-member quantile for p ≤ 1/2.
    fn lower0(&self, p: f64) -> f64 {
        let a = self.shape;
        match self.family {
            Family::Exponential => -(-p).ln_1p(),
            Family::Weibull => (-(-p).ln_1p()).powf(1.0 / a),
            Family::Gamma => gamma_inv_lower(a, p),
            Family::Lognormal => (a * normal_lower(p)).exp(),
            Family::Pareto => (-(-p).ln_1p() / a).exp(),
            Family::Gaussian => normal_lower(p),
            Family::GeneralizedGaussian => {
                if p == 0.5 {
                    0.0
                } else {
                    -gamma_inv_upper(1.0 / a, 2.0 * p).powf(1.0 / a)
                }
            }
            Family::Uniform => p,
        }
    }

    // Standard-member Q(1 - q) for q ≤ 1/2.
    fn upper0(&self, q: f64) -> f64 {
        let a = self.shape;
        match self.family {
            Family::Exponential => -q.ln(),
            Family::Weibull => (-q.ln()).powf(1.0 / a),
            Family::Gamma => gamma_inv_upper(a, q),
            Family::Lognormal => (a * normal_upper(q)).exp(),
            Family::Pareto => q.powf(-1.0 / a),
            Family::Gaussian => normal_upper(q),
            Family::GeneralizedGaussian => {
                if q == 0.5 {
                    0.0
                } else {
                    gamma_inv_upper(1.0 / a, 2.0 * q).powf(1.0 / a)
                }
            }
            Family::Uniform => 1.0 - q,
        }
    }

    fn finish(&self, z: f64, p: f64) -> Result<f64> {
        let x = self.location + self.scale * z;
        if x.is_finite() {
            Ok(x)
        } else {
            Err(domain(format!("infinite endpoint: Q({p}) is unbounded for {}", self.family)))
        }
    }

    /// Q(p) for p in [0, 1].
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(domain(format!("probability {p} outside [0, 1]")));
        }
        let z = if p <= 0.5 { self.lower0(p) } else { self.upper0(1.0 - p) };
        self.finish(z, p)
    }

    /// Q(1 - q) for q in [0, 1], computed without cancellation in the upper tail.
    pub fn quantile_upper(&self, q: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&q) {
            return Err(domain(format!("probability {q} outside [0, 1]")));
        }
        let z = if q <= 0.5 { self.upper0(q) } else { self.lower0(1.0 - q) };
        self.finish(z, 1.0 - q)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let z = (x - self.location) / self.scale;
        let a = self.shape;
        match self.family {
            Family::Exponential => {
                if z <= 0.0 {
                    0.0
                } else {
                    -(-z).exp_m1()
                }
            }
            Family::Weibull => {
                if z <= 0.0 {
                    0.0
                } else {
                    -(-z.powf(a)).exp_m1()
                }
            }
            Family::Gamma => {
                if z <= 0.0 {
                    0.0
                } else {
                    special::reg_lower(a, z)
                }
            }
            Family::Lognormal => {
                if z <= 0.0 {
                    0.0
                } else {
                    normal_cdf(z.ln() / a)
                }
            }
            Family::Pareto => {
                if z <= 1.0 {
                    0.0
                } else {
                    -(-a * z.ln()).exp_m1()
                }
            }
            Family::Gaussian => normal_cdf(z),
            Family::GeneralizedGaussian => {
                let t = z.abs().powf(a);
                if z >= 0.0 {
                    0.5 + 0.5 * special::reg_lower(1.0 / a, t)
                } else {
                    0.5 * special::reg_upper(1.0 / a, t)
                }
            }
            Family::Uniform => z.clamp(0.0, 1.0),
        }
    }

    /// Survival function 1 − F(x), accurate in the upper tail.
    pub fn sf(&self, x: f64) -> f64 {
        let z = (x - self.location) / self.scale;
        let a = self.shape;
        match self.family {
            Family::Exponential => (-z.max(0.0)).exp(),
            Family::Weibull => (-(z.max(0.0)).powf(a)).exp(),
            Family::Gamma => {
                if z <= 0.0 {
                    1.0
                } else {
                    special::reg_upper(a, z)
                }
            }
            Family::Lognormal => {
                if z <= 0.0 {
                    1.0
                } else {
                    normal_cdf(-z.ln() / a)
                }
            }
            Family::Pareto => {
                if z <= 1.0 {
                    1.0
                } else {
                    z.powf(-a)
                }
            }
            Family::Gaussian => normal_cdf(-z),
            Family::GeneralizedGaussian => {
                let t = z.abs().powf(a);
                if z >= 0.0 {
                    0.5 * special::reg_upper(1.0 / a, t)
                } else {
                    0.5 + 0.5 * special::reg_lower(1.0 / a, t)
                }
            }
            Family::Uniform => 1.0 - z.clamp(0.0, 1.0),
        }
    }

    /// f(x); zero outside the support.
    pub fn density(&self, x: f64) -> f64 {
        let z = (x - self.location) / self.scale;
        let a = self.shape;
        let f0 = match self.family {
            Family::Exponential => {
                if z < 0.0 {
                    0.0
                } else {
                    (-z).exp()
                }
            }
            Family::Weibull => {
                if z < 0.0 || (z == 0.0 && a > 1.0) {
                    0.0
                } else if z == 0.0 {
                    if a == 1.0 {
                        1.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    a * z.powf(a - 1.0) * (-z.powf(a)).exp()
                }
            }
            Family::Gamma => {
                if z < 0.0 || (z == 0.0 && a > 1.0) {
                    0.0
                } else if z == 0.0 {
                    if a == 1.0 {
                        1.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    ((a - 1.0) * z.ln() - z - ln_gamma(a)).exp()
                }
            }
            Family::Lognormal => {
                if z <= 0.0 {
                    0.0
                } else {
                    let l = z.ln() / a;
                    (-0.5 * l * l).exp() / (z * a * (2.0 * std::f64::consts::PI).sqrt())
                }
            }
            Family::Pareto => {
                if z < 1.0 {
                    0.0
                } else {
                    a * z.powf(-a - 1.0)
                }
            }
            Family::Gaussian => (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt(),
            Family::GeneralizedGaussian => {
                (a.ln() - std::f64::consts::LN_2 - ln_gamma(1.0 / a) - z.abs().powf(a)).exp()
            }
            Family::Uniform => {
                if (0.0..=1.0).contains(&z) {
                    1.0
                } else {
                    0.0
                }
            }
        };
        f0 / self.scale
    }

    /// Highest finite moment order among 1..=4 (4 means all four exist).
    fn finite_moment_orders(&self) -> u32 {
        if self.family == Family::Pareto {
            // E X^r finite iff α > r.
            (1..=4).take_while(|&r| self.shape > r as f64).count() as u32
        } else {
            4
        }
    }

    /// Closed-form mean, sd, skewness and kurtosis.
    pub fn moment_summary(&self) -> Result<MomentSummary> {
        let finite = self.finite_moment_orders();
        if finite < 4 {
            return Err(Error::MomentDivergence { order: finite + 1 });
        }
        let (m0, sd0, skew, kurt) = standard_moments(self.family, self.shape);
        Ok(MomentSummary {
            mean: self.location + self.scale * m0,
            sd: self.scale * sd0,
            skewness: skew,
            kurtosis: kurt,
        })
    }

    /// Mean and standard deviation; only needs a finite second moment.
    pub fn mean_sd(&self) -> Result<(f64, f64)> {
        let finite = self.finite_moment_orders();
        if finite < 2 {
            return Err(Error::MomentDivergence { order: finite + 1 });
        }
        if self.family == Family::Pareto {
            let a = self.shape;
            let m = a / (a - 1.0);
            let v = a / ((a - 1.0) * (a - 1.0) * (a - 2.0));
            return Ok((self.location + self.scale * m, self.scale * v.sqrt()));
        }
        let s = self.moment_summary()?;
        Ok((s.mean, s.sd))
    }

    /// Moments by adaptive quadrature of the quantile function over (δ, 1 − δ),
    /// δ = 1e-12, with a power-law tail correction.
    pub fn numeric_moment_summary(&self) -> Result<MomentSummary> {
        moments_from_quantiles(
            |p| self.quantile(p).unwrap_or(f64::NAN),
            |q| self.quantile_upper(q).unwrap_or(f64::NAN),
        )
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}(shape={}, scale={}, location={})",
            self.family, self.shape, self.scale, self.location
        )
    }
}

fn standard_moments(family: Family, a: f64) -> (f64, f64, f64, f64) {
    match family {
        Family::Exponential => (1.0, 1.0, 2.0, 9.0),
        Family::Weibull => weibull_moments(a),
        Family::Gamma => (a, a.sqrt(), 2.0 / a.sqrt(), 3.0 + 6.0 / a),
        Family::Lognormal => {
            let w = (a * a).exp();
            let mean = (0.5 * a * a).exp();
            let var = (w - 1.0) * w;
            let skew = (w + 2.0) * (w - 1.0).sqrt();
            let kurt = w.powi(4) + 2.0 * w.powi(3) + 3.0 * w.powi(2) - 3.0;
            (mean, var.sqrt(), skew, kurt)
        }
        Family::Pareto => {
            let mean = a / (a - 1.0);
            let var = a / ((a - 1.0) * (a - 1.0) * (a - 2.0));
            let skew = 2.0 * (1.0 + a) / (a - 3.0) * ((a - 2.0) / a).sqrt();
            let kurt = 3.0 + 6.0 * (a.powi(3) + a * a - 6.0 * a - 2.0) / (a * (a - 3.0) * (a - 4.0));
            (mean, var.sqrt(), skew, kurt)
        }
        Family::Gaussian => (0.0, 1.0, 0.0, 3.0),
        Family::GeneralizedGaussian => {
            let l1 = ln_gamma(1.0 / a);
            let l3 = ln_gamma(3.0 / a);
            let l5 = ln_gamma(5.0 / a);
            let var = (l3 - l1).exp();
            (0.0, var.sqrt(), 0.0, (l5 + l1 - 2.0 * l3).exp())
        }
        Family::Uniform => (0.5, (1.0f64 / 12.0).sqrt(), 0.0, 1.8),
    }
}

fn weibull_moments(a: f64) -> (f64, f64, f64, f64) {
    let g = |i: f64| ln_gamma(1.0 + i / a).exp();
    let (g1, g2, g3, g4) = (g(1.0), g(2.0), g(3.0), g(4.0));
    let var = g2 - g1 * g1;
    let skew = (g3 - 3.0 * g1 * g2 + 2.0 * g1.powi(3)) / var.powf(1.5);
    let kurt = (g4 - 4.0 * g1 * g3 + 6.0 * g1 * g1 * g2 - 3.0 * g1.powi(4)) / (var * var);
    (g1, var.sqrt(), skew, kurt)
}

const TAIL_DELTA: f64 = 1e-12;

// ∫_0^{1/2} g, with the (0, δ) piece approximated by a power law fitted at δ.
fn half_integral<G: Fn(f64) -> f64>(g: G, order: u32) -> Result<f64> {
    let body = numeric::integrate_abs(&g, TAIL_DELTA, 0.5, 1e-10, 1e-300)?.value;
    let g1 = g(TAIL_DELTA);
    let g10 = g(10.0 * TAIL_DELTA);
    let tail = if g1 == 0.0 || g10 == 0.0 || g1.signum() != g10.signum() {
        g1 * TAIL_DELTA
    } else {
        // |g| ~ q^{-e} near zero.
        let e = (g1 / g10).ln() / std::f64::consts::LN_10;
        if e >= 0.999 {
            return Err(Error::MomentDivergence { order });
        }
        g1 * TAIL_DELTA / (1.0 - e)
    };
    Ok(body + tail)
}

/// Moments of the law with lower-half quantile `lower(p)` (p ≤ 1/2) and
/// upper-half quantile `upper(q) = Q(1 − q)` (q ≤ 1/2).
pub(crate) fn moments_from_quantiles<L, U>(lower: L, upper: U) -> Result<MomentSummary>
where
    L: Fn(f64) -> f64,
    U: Fn(f64) -> f64,
{
    let raw = |r: u32, c: f64| -> Result<f64> {
        let lo = half_integral(|p| (lower(p) - c).powi(r as i32), r)?;
        let hi = half_integral(|q| (upper(q) - c).powi(r as i32), r)?;
        Ok(lo + hi)
    };
    let mean = raw(1, 0.0)?;
    let m2 = raw(2, mean)?;
    let m3 = raw(3, mean)?;
    let m4 = raw(4, mean)?;
    if !(m2 > 0.0) {
        return Err(domain("degenerate distribution (zero variance)"));
    }
    Ok(MomentSummary {
        mean,
        sd: m2.sqrt(),
        skewness: m3 / m2.powf(1.5),
        kurtosis: m4 / (m2 * m2),
    })
}

/// Weibull shape at which kurtosis is minimal (≈ 3.36); the decreasing branch
/// below it is the one used for kurtosis inversion.
pub fn weibull_min_kurtosis_shape() -> f64 {
    static CELL: OnceLock<f64> = OnceLock::new();
    *CELL.get_or_init(|| numeric::golden_min(|a| weibull_moments(a).3, 2.0, 5.0, 1e-12))
}

// Shape brackets (in the family's own parameter) on which kurtosis is monotone.
fn shape_bracket(family: Family) -> Option<(f64, f64)> {
    match family {
        Family::Weibull => Some((0.05, weibull_min_kurtosis_shape())),
        Family::Gamma => Some((1e-4, 1e8)),
        Family::Lognormal => Some((1e-4, 3.0)),
        Family::Pareto => Some((4.0 + 1e-9, 1e7)),
        Family::GeneralizedGaussian => Some((0.1, 1e3)),
        _ => None,
    }
}

fn kurtosis_of(family: Family, shape: f64) -> f64 {
    standard_moments(family, shape).3
}

/// Attainable (non-excess) kurtosis interval for a family.
pub fn kurtosis_range(family: Family) -> (f64, f64) {
    match shape_bracket(family) {
        Some((lo, hi)) => {
            let (a, b) = (kurtosis_of(family, lo), kurtosis_of(family, hi));
            (a.min(b), a.max(b))
        }
        None => {
            let k = standard_moments(family, 1.0).3;
            (k, k)
        }
    }
}

/// Find the shape whose kurtosis equals `kappa` (scale fixed, location 0).
pub fn solve_param_for_kurtosis(family: Family, kappa: f64, scale: f64) -> Result<DistributionSpec> {
    let (lo, hi) = kurtosis_range(family);
    let Some((s_lo, s_hi)) = shape_bracket(family) else {
        if (kappa - lo).abs() <= 1e-9 {
            return DistributionSpec::new(family, 1.0, scale, 0.0);
        }
        return Err(Error::Range { target: kappa, lo, hi });
    };
    if !(kappa >= lo && kappa <= hi) {
        return Err(Error::Range { target: kappa, lo, hi });
    }
    // Bisection in log-shape; kurtosis is monotone on the bracket.
    let f = |t: f64| kurtosis_of(family, t.exp()) - kappa;
    let t = numeric::bisect(f, s_lo.ln(), s_hi.ln(), 0.0)?;
    DistributionSpec::new(family, t.exp(), scale, 0.0)
}
