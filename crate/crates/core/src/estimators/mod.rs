//! Order-statistic (L-type) location estimators.
//!
//! Every estimator here is a weighted average of order statistics. Its
//! weights come from a [`layout`] in probability coordinates. A layout is
//! scaled to the sample size with fractional weights at non-integral block
//! boundaries. It can also be integrated against a population quantile
//! function; see [`population_value`].
//!
//! Block-structured means (SM, BM) place blocks symmetrically in the
//! quantile-average domain u ∈ [0, 1/(1+γ)]. Their u-blocks are grouped into
//! periods with a fixed weight pattern. A remainder that is not a whole
//! period becomes one central block on the γ-median. That block is one
//! block wide when less than half a period remains. Otherwise it has
//! half-width `remainder − 1` blocks.

pub mod layout;
pub mod profile;

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample as sample_indices;

use crate::distmodel::QuantileModel;
use crate::error::{param, Error, Result};
use crate::numeric::{is_integral, snap};
use layout::Layout;
pub use profile::WeightProfile;

#[derive(Debug, Clone, PartialEq)]
pub struct SortedSample {
    values: Vec<f64>,
}

impl SortedSample {
    /// Validates finiteness and ascending order.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some(i) = values.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        if let Some(i) = values.windows(2).position(|w| w[0] > w[1]) {
            return Err(Error::NotSorted(i + 1));
        }
        Ok(Self { values })
    }

    pub fn from_unsorted(mut values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        values.sort_unstable_by(|a, b| a.total_cmp(b));
        Self::new(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Sample λX + μ (λ > 0 keeps the order).
    pub fn affine(&self, lambda: f64, mu: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(param("affine factor must be positive"));
        }
        Self::new(self.values.iter().map(|x| lambda * x + mu).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrimSpec {
    pub epsilon: f64,
    pub gamma: f64,
    pub nu: u32,
    pub strata: u32,
}

impl TrimSpec {
    pub fn new(epsilon: f64, gamma: f64) -> Result<Self> {
        let t = Self { epsilon, gamma, nu: 3, strata: 3 };
        t.validate()?;
        Ok(t)
    }

    pub fn symmetric(epsilon: f64) -> Result<Self> {
        Self::new(epsilon, 1.0)
    }

    pub fn with_nu(mut self, nu: u32) -> Result<Self> {
        self.nu = nu;
        self.validate()?;
        Ok(self)
    }

    pub fn with_strata(mut self, b: u32) -> Result<Self> {
        self.strata = b;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let (e, g) = (self.epsilon, self.gamma);
        if !(g >= 0.0 && g.is_finite()) {
            return Err(param(format!("gamma must be >= 0, got {g}")));
        }
        if !(e >= 0.0 && e <= 1.0 / (1.0 + g) * (1.0 + 1e-12)) {
            return Err(param(format!("epsilon {e} outside [0, 1/(1+gamma)]")));
        }
        if self.nu < 1 {
            return Err(param("nu must be >= 1"));
        }
        if self.strata < 3 || self.strata % 2 == 0 {
            return Err(param(format!("strata b must be odd and >= 3, got {}", self.strata)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QuantileConvention {
    #[default]
    Ceiling,
    Midpoint,
}

impl fmt::Display for QuantileConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QuantileConvention::Ceiling => "ceiling",
            QuantileConvention::Midpoint => "midpoint",
        })
    }
}

impl FromStr for QuantileConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ceiling" => Ok(Self::Ceiling),
            "midpoint" => Ok(Self::Midpoint),
            _ => Err(param(format!("unknown quantile convention '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QaDefinition {
    /// ½(Q(γε) + Q(1−ε))
    #[default]
    Eq1,
    /// ½(Q(ε) + Q(1−γε))
    Eq2,
}

/// How non-integral block boundaries are resolved on samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FractionalMode {
    /// Straddled order statistics get the covered fraction as weight.
    #[default]
    Weighted,
    /// Average over `reps` subsamples (without replacement) of the largest
    /// size n′ ≤ n that makes every boundary integral.
    SubsampleAverage { reps: usize, seed: u64 },
}

/// The L-estimators of this module. Parameters come from a [`TrimSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LEstimator {
    Mean,
    Median,
    QuantileAverage(QaDefinition),
    Trimmed,
    Winsorized,
    BlockWinsorized,
    Stratified,
    Binomial,
    StratifiedQuantile,
}

impl LEstimator {
    pub fn name(&self) -> &'static str {
        match self {
            LEstimator::Mean => "mean",
            LEstimator::Median => "median",
            LEstimator::QuantileAverage(QaDefinition::Eq1) => "qa",
            LEstimator::QuantileAverage(QaDefinition::Eq2) => "qa2",
            LEstimator::Trimmed => "tm",
            LEstimator::Winsorized => "wm",
            LEstimator::BlockWinsorized => "bwm",
            LEstimator::Stratified => "sm",
            LEstimator::Binomial => "bm",
            LEstimator::StratifiedQuantile => "sqm",
        }
    }

    /// Whether the estimator reads ε from its TrimSpec.
    pub fn uses_epsilon(&self) -> bool {
        !matches!(self, LEstimator::Mean | LEstimator::Median)
    }

    /// Upper asymptotic breakdown point.
    pub fn breakdown(&self, t: &TrimSpec) -> f64 {
        match self {
            LEstimator::Mean => 0.0,
            LEstimator::Median => 0.5,
            LEstimator::QuantileAverage(QaDefinition::Eq2) => t.gamma * t.epsilon,
            _ => t.epsilon,
        }
    }

    /// Weighted layout in probability coordinates. Winsorized uses its
    /// population form here; the sample version floors boundaries separately.
    pub(crate) fn layout(&self, t: &TrimSpec) -> Result<Layout> {
        t.validate()?;
        let (e, g) = (t.epsilon, t.gamma);
        let mut l = Layout::default();
        match self {
            LEstimator::Mean => l.segment(0.0, 1.0, 1.0),
            LEstimator::Median => l.quantile(0.5, 1.0),
            LEstimator::QuantileAverage(def) => {
                let (lo, hi) = match def {
                    QaDefinition::Eq1 => (g * e, 1.0 - e),
                    QaDefinition::Eq2 => (e, 1.0 - g * e),
                };
                l.quantile(lo, 0.5);
                l.quantile(hi, 0.5);
            }
            LEstimator::Trimmed => {
                if !(1.0 - e - g * e > 0.0) {
                    return Err(Error::OverTrim(format!("epsilon={e} gamma={g} leaves no core")));
                }
                l.segment(g * e, 1.0 - e, 1.0);
            }
            LEstimator::Winsorized => {
                if !(1.0 - e - g * e > 0.0) {
                    return Err(Error::OverTrim(format!("epsilon={e} gamma={g} leaves no core")));
                }
                l.segment(g * e, 1.0 - e, 1.0);
                l.quantile(g * e, g * e);
                l.quantile(1.0 - e, e);
            }
            LEstimator::BlockWinsorized => {
                check_bwm_geometry(e, g)?;
                l.segment(g * e, 1.0 - e, 1.0);
                l.segment(g * e, 2.0 * g * e, 1.0);
                l.segment(1.0 - 2.0 * e, 1.0 - e, 1.0);
            }
            LEstimator::Stratified => {
                let b = t.strata;
                let unit = 2.0 * e / (b - 1) as f64;
                let mut pattern = vec![0.0; b as usize];
                pattern[(b as usize - 1) / 2] = b as f64;
                grouped_blocks(&mut l, unit, g, &pattern, b as f64, false)?;
            }
            LEstimator::Binomial => {
                let nu = t.nu;
                let pattern: Vec<f64> = (0..=nu)
                    .map(|j| {
                        let c = binomial(nu, j);
                        if j % 2 == 0 {
                            1.0 - c
                        } else {
                            1.0 + c
                        }
                    })
                    .collect();
                grouped_blocks(&mut l, e, g, &pattern, (nu + 1) as f64, true)?;
            }
            LEstimator::StratifiedQuantile => {
                let terms = sqm_terms(e)?;
                for i in 1..=terms {
                    let odd = (2 * i - 1) as f64;
                    l.quantile(odd * g * e, 2.0 * e);
                    l.quantile(1.0 - odd * e, 2.0 * e);
                }
            }
        }
        Ok(l)
    }

    /// Per-order-statistic weight profile for sample size n.
    pub fn profile(&self, n: usize, t: &TrimSpec, conv: QuantileConvention) -> Result<WeightProfile> {
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        let (e, g) = (t.epsilon, t.gamma);
        let nf = n as f64;
        match self {
            LEstimator::Median => {
                return Ok(self.layout(t)?.profile(n, QuantileConvention::Midpoint));
            }
            LEstimator::Trimmed | LEstimator::Winsorized => {
                let left = snap(nf * g * e).ceil();
                let right = snap(nf * e).ceil();
                if left + right >= nf && e > 0.0 {
                    return Err(Error::OverTrim(format!(
                        "trims {left} + {right} leave no core in n = {n}"
                    )));
                }
            }
            LEstimator::BlockWinsorized => {
                check_bwm_geometry(e, g)?;
                if snap(nf * e).floor() < 1.0 || (g > 0.0 && snap(nf * g * e).floor() < 1.0) {
                    return Err(Error::Geometry(format!(
                        "blocks of size n*gamma*eps and n*eps must hold an element (n = {n})"
                    )));
                }
            }
            _ => {}
        }
        if let LEstimator::Winsorized = self {
            return Ok(winsorized_profile(n, e, g));
        }
        Ok(self.layout(t)?.profile(n, conv))
    }

    /// Evaluate on a sorted sample.
    pub fn estimate(
        &self,
        s: &SortedSample,
        t: &TrimSpec,
        conv: QuantileConvention,
        mode: FractionalMode,
    ) -> Result<f64> {
        match mode {
            FractionalMode::Weighted => Ok(self.profile(s.len(), t, conv)?.apply(s.values())),
            FractionalMode::SubsampleAverage { reps, seed } => {
                subsample_average(self, s, t, conv, reps, seed)
            }
        }
    }
}

impl fmt::Display for LEstimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LEstimator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "mean" => LEstimator::Mean,
            "median" => LEstimator::Median,
            "qa" | "qa1" => LEstimator::QuantileAverage(QaDefinition::Eq1),
            "qa2" => LEstimator::QuantileAverage(QaDefinition::Eq2),
            "tm" => LEstimator::Trimmed,
            "wm" => LEstimator::Winsorized,
            "bwm" => LEstimator::BlockWinsorized,
            "sm" => LEstimator::Stratified,
            "bm" => LEstimator::Binomial,
            "sqm" => LEstimator::StratifiedQuantile,
            _ => return Err(param(format!("unknown L-estimator '{s}'"))),
        })
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn check_bwm_geometry(e: f64, g: f64) -> Result<()> {
    if 2.0 * e * (1.0 + g) > 1.0 + 1e-12 {
        return Err(Error::Geometry(format!(
            "doubled blocks overlap: 2*eps*(1+gamma) = {} > 1",
            2.0 * e * (1.0 + g)
        )));
    }
    Ok(())
}

fn sqm_terms(e: f64) -> Result<usize> {
    if !(e > 0.0) {
        return Err(param("SQM needs epsilon > 0"));
    }
    let m = snap(1.0 / (4.0 * e));
    if m < 1.0 || m.fract() != 0.0 {
        let near = (1.0 / (4.0 * e)).round().max(1.0);
        return Err(param(format!(
            "SQM needs 1/(4 eps) integral; eps = {e} is invalid, nearest valid eps = 1/{}",
            4.0 * near
        )));
    }
    Ok(m as usize)
}

/// Lays out mirrored u-blocks of width `unit` over [0, 1/(1+γ)], cycling
/// `pattern`, with the central remainder rule described in the module docs.
fn grouped_blocks(
    l: &mut Layout,
    unit: f64,
    gamma: f64,
    pattern: &[f64],
    central_weight: f64,
    need_full_group: bool,
) -> Result<()> {
    if !(unit > 0.0) {
        return Err(Error::Geometry("block width must be positive".into()));
    }
    let period = pattern.len() as f64;
    let per_side = snap(1.0 / ((1.0 + gamma) * unit));
    let groups = snap(per_side / period).floor();
    let mut rem = snap(per_side - groups * period);
    if rem < 1e-9 {
        rem = 0.0;
    }
    let selected = 2.0 * groups + if rem >= period / 2.0 { 1.0 } else { 0.0 };
    if selected < 1.0 || (need_full_group && groups < 1.0) {
        return Err(Error::Geometry(format!(
            "{per_side} blocks per side cannot hold a group of {period}"
        )));
    }
    let full = (groups * period) as usize;
    for m in 0..full {
        let w = pattern[m % pattern.len()];
        l.qa_block(m as f64 * unit, (m + 1) as f64 * unit, w, gamma);
    }
    if rem > 0.0 {
        let half = if rem < period / 2.0 { rem.min(0.5) } else { rem - 1.0 };
        if half > 0.0 {
            l.qa_block((per_side - half) * unit, per_side * unit, central_weight, gamma);
        }
    }
    Ok(())
}

// (1/n)[Σ_{i=⌊nγε⌋+1}^{n−⌊nε⌋} X_i + ⌊nγε⌋ X_{⌊nγε⌋+1} + ⌊nε⌋ X_{n−⌊nε⌋}]
fn winsorized_profile(n: usize, e: f64, g: f64) -> WeightProfile {
    let nf = n as f64;
    let left = snap(nf * g * e).floor() as usize;
    let right = snap(nf * e).floor() as usize;
    let mut b = profile::ProfileBuilder::new(n);
    b.segment(left as f64, (n - right) as f64, 1.0);
    b.mass(left, left as f64);
    b.mass(n - right - 1, right as f64);
    b.build()
}

fn subsample_average(
    est: &LEstimator,
    s: &SortedSample,
    t: &TrimSpec,
    conv: QuantileConvention,
    reps: usize,
    seed: u64,
) -> Result<f64> {
    if reps == 0 {
        return Err(param("subsample-average mode needs reps >= 1"));
    }
    let n = s.len();
    let layout = est.layout(t)?;
    let size = (1..=n)
        .rev()
        .find(|&m| {
            layout.boundaries(m).into_iter().all(is_integral)
                && (*est != LEstimator::Winsorized
                    || (is_integral(m as f64 * t.epsilon)
                        && is_integral(m as f64 * t.epsilon * t.gamma)))
                && est.profile(m, t, conv).is_ok()
        })
        .ok_or_else(|| Error::Geometry("no subsample size makes the boundaries integral".into()))?;
    let prof = est.profile(size, t, conv)?;
    if size == n {
        return Ok(prof.apply(s.values()));
    }
    let mut rng = crate::distmodel::sample_rng(seed);
    let mut acc = 0.0;
    let mut buf = Vec::with_capacity(size);
    for _ in 0..reps {
        let mut idx = sample_indices(&mut rng, n, size).into_vec();
        idx.sort_unstable();
        buf.clear();
        buf.extend(idx.iter().map(|&i| s.values()[i]));
        acc += prof.apply(&buf);
    }
    Ok(acc / reps as f64)
}

/// Population counterpart of an estimator (numeric integration of Q).
pub fn population_value<M: QuantileModel + ?Sized>(dist: &M, est: LEstimator, t: &TrimSpec) -> Result<f64> {
    est.layout(t)?.population(dist, 1e-10)
}

// Named wrappers ---------------------------------------------------------

pub fn empirical_quantile(s: &SortedSample, p: f64, conv: QuantileConvention) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(param(format!("probability {p} outside [0, 1]")));
    }
    let xs = s.values();
    Ok(layout::quantile_indices(xs.len(), p, conv)
        .into_iter()
        .map(|(i, w)| w * xs[i])
        .sum())
}

pub fn quantile_average(s: &SortedSample, t: &TrimSpec, def: QaDefinition, conv: QuantileConvention) -> Result<f64> {
    t.validate()?;
    let (lo, hi) = match def {
        QaDefinition::Eq1 => (t.gamma * t.epsilon, 1.0 - t.epsilon),
        QaDefinition::Eq2 => (t.epsilon, 1.0 - t.gamma * t.epsilon),
    };
    Ok(0.5 * (empirical_quantile(s, lo, conv)? + empirical_quantile(s, hi, conv)?))
}

pub fn median(s: &SortedSample) -> f64 {
    let xs = s.values();
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

pub fn mean(s: &SortedSample) -> f64 {
    s.values().iter().sum::<f64>() / s.len() as f64
}

fn weighted(est: LEstimator, s: &SortedSample, t: &TrimSpec) -> Result<f64> {
    est.estimate(s, t, QuantileConvention::Ceiling, FractionalMode::Weighted)
}

pub fn trimmed_mean(s: &SortedSample, t: &TrimSpec) -> Result<f64> {
    weighted(LEstimator::Trimmed, s, t)
}

pub fn winsorized_mean(s: &SortedSample, t: &TrimSpec) -> Result<f64> {
    weighted(LEstimator::Winsorized, s, t)
}

pub fn block_winsorized_mean(s: &SortedSample, t: &TrimSpec) -> Result<f64> {
    weighted(LEstimator::BlockWinsorized, s, t)
}

pub fn stratified_mean(s: &SortedSample, t: &TrimSpec) -> Result<f64> {
    weighted(LEstimator::Stratified, s, t)
}

pub fn binomial_mean(s: &SortedSample, t: &TrimSpec) -> Result<f64> {
    weighted(LEstimator::Binomial, s, t)
}

pub fn stratified_quantile_mean(s: &SortedSample, t: &TrimSpec, conv: QuantileConvention) -> Result<f64> {
    LEstimator::StratifiedQuantile.estimate(s, t, conv, FractionalMode::Weighted)
}

#[cfg(test)]
mod tests;
