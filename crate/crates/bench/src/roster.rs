//! Estimator specs: `id[:key=val]*`, e.g. `tm:eps=1/8`, `mhlm:eps=0.125`,
//! `thlm:k=2:eps=1/8:budget=1e6`, `mom:k=2`.
//!
//! Keys: `eps`, `gamma`, `nu`, `b`, `k`, `eps0`, `budget`, `w` (rank weights,
//! `|`-separated), `stream` (pseudo/quasi), `conv` (ceiling/midpoint),
//! `blocks` (MoRM draws), `mode` (auto/exact/bootstrap), `label`.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use robloc::estimators::{
    mean, median, FractionalMode, LEstimator, QaDefinition, QuantileConvention, SortedSample,
    TrimSpec,
};
use robloc::kernels::{
    breakdown_mapping, gamma_median_of_means, inverse_breakdown_mapping,
    median_of_randomized_means, weighted_hl_mean_with_sequence, IndexStream, KernelMode, KernelSpec,
    Partition,
};

use crate::config::{parse_count, parse_number};
use crate::error::{config, Result};

/// Overall breakdown point shared by the standard roster.
pub const STANDARD_EPSILON: f64 = 0.125;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    /// A plain L-estimator on the sample.
    L(LEstimator),
    /// L-estimator applied to the kernel sequence (median: mHLM).
    Whl(LEstimator),
    Mom,
    Morm,
}

impl Kind {
    fn id(self) -> &'static str {
        match self {
            Kind::L(e) => e.name(),
            Kind::Whl(LEstimator::Median) => "mhlm",
            Kind::Whl(LEstimator::Trimmed) => "thlm",
            Kind::Whl(LEstimator::Winsorized) => "wihlm",
            Kind::Whl(LEstimator::StratifiedQuantile) => "sqhlm",
            Kind::Whl(LEstimator::BlockWinsorized) => "bwhlm",
            Kind::Whl(_) => "whlm",
            Kind::Mom => "mom",
            Kind::Morm => "morm",
        }
    }

    fn from_id(id: &str) -> Option<Kind> {
        Some(match id {
            "mean" => Kind::L(LEstimator::Mean),
            "median" => Kind::L(LEstimator::Median),
            "qa" => Kind::L(LEstimator::QuantileAverage(QaDefinition::Eq1)),
            "qa2" => Kind::L(LEstimator::QuantileAverage(QaDefinition::Eq2)),
            "tm" => Kind::L(LEstimator::Trimmed),
            "wm" => Kind::L(LEstimator::Winsorized),
            "bwm" => Kind::L(LEstimator::BlockWinsorized),
            "sm" => Kind::L(LEstimator::Stratified),
            "bm" => Kind::L(LEstimator::Binomial),
            "sqm" => Kind::L(LEstimator::StratifiedQuantile),
            "mhlm" => Kind::Whl(LEstimator::Median),
            "thlm" => Kind::Whl(LEstimator::Trimmed),
            "wihlm" => Kind::Whl(LEstimator::Winsorized),
            "sqhlm" => Kind::Whl(LEstimator::StratifiedQuantile),
            "bwhlm" => Kind::Whl(LEstimator::BlockWinsorized),
            "mom" => Kind::Mom,
            "morm" => Kind::Morm,
            _ => return None,
        })
    }
}

/// A fully resolved estimator: for kernel estimators ε, ε₀ and k are all
/// filled in and consistent with the breakdown mapping.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorSpec {
    pub kind: Kind,
    pub label: Option<String>,
    pub epsilon: Option<f64>,
    pub gamma: f64,
    pub nu: u32,
    pub strata: u32,
    pub k: Option<f64>,
    pub epsilon0: Option<f64>,
    pub budget: Option<usize>,
    pub weights: Option<Vec<f64>>,
    pub stream: IndexStream,
    pub mode: KernelMode,
    pub conv: QuantileConvention,
    pub blocks: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    /// Monte-Carlo SE from kernel bootstrapping, when there is one.
    pub se: Option<f64>,
}

impl EstimatorSpec {
    fn bare(kind: Kind) -> Self {
        Self {
            kind,
            label: None,
            epsilon: None,
            gamma: 1.0,
            nu: 3,
            strata: 3,
            k: None,
            epsilon0: None,
            budget: None,
            weights: None,
            stream: IndexStream::Pseudo,
            mode: KernelMode::Auto,
            conv: QuantileConvention::Ceiling,
            blocks: None,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let mut parts = s.trim().split(':');
        let id = parts.next().unwrap_or("").trim().to_ascii_lowercase();
        let kind = Kind::from_id(&id).ok_or_else(|| config(format!("unknown estimator '{id}'")))?;
        let mut e = Self::bare(kind);
        for part in parts {
            let (key, val) = part
                .split_once('=')
                .ok_or_else(|| config(format!("'{s}': expected key=value, got '{part}'")))?;
            let (key, val) = (key.trim(), val.trim());
            let num = || parse_number(val).map_err(|m| config(format!("'{s}': {key}: {m}")));
            let cnt = || parse_count(val).map_err(|m| config(format!("'{s}': {key}: {m}")));
            match key {
                "eps" => e.epsilon = Some(num()?),
                "gamma" => e.gamma = num()?,
                "nu" => e.nu = cnt()? as u32,
                "b" => e.strata = cnt()? as u32,
                "k" => e.k = Some(num()?),
                "eps0" => e.epsilon0 = Some(num()?),
                "budget" => e.budget = Some(cnt()?),
                "blocks" => e.blocks = Some(cnt()?),
                "w" => {
                    let w = val
                        .split('|')
                        .map(|x| parse_number(x).map_err(|m| config(format!("'{s}': w: {m}"))))
                        .collect::<Result<Vec<f64>>>()?;
                    e.weights = Some(w);
                }
                "stream" => {
                    e.stream = match val {
                        "pseudo" => IndexStream::Pseudo,
                        "quasi" => IndexStream::Quasi,
                        _ => return Err(config(format!("'{s}': stream must be pseudo or quasi"))),
                    }
                }
                "mode" => {
                    e.mode = match val {
                        "auto" => KernelMode::Auto,
                        "exact" => KernelMode::Exact,
                        "bootstrap" => KernelMode::Bootstrap,
                        _ => return Err(config(format!("'{s}': mode must be auto, exact or bootstrap"))),
                    }
                }
                "conv" => e.conv = QuantileConvention::from_str(val)?,
                "label" => e.label = Some(val.to_string()),
                _ => return Err(config(format!("'{s}': unknown key '{key}'"))),
            }
        }
        e.resolve()
    }

    /// Fill in derived parameters and check everything that does not depend
    /// on the sample size.
    pub fn resolve(mut self) -> Result<Self> {
        let bad = |m: String| config(format!("{}: {m}", self.kind.id()));
        match self.kind {
            Kind::L(est) => {
                if est.uses_epsilon() && self.epsilon.is_none() {
                    return Err(bad("needs eps".into()));
                }
                self.trim()?;
            }
            Kind::Whl(inner) => {
                if inner == LEstimator::Median {
                    if self.gamma != 1.0 {
                        return Err(bad("the median kernel estimator is symmetric (gamma = 1)".into()));
                    }
                    if self.epsilon0.is_some_and(|e0| e0 != 0.5) {
                        return Err(bad("eps0 of the median is 1/2".into()));
                    }
                    self.epsilon0 = Some(0.5);
                }
                match (self.epsilon, self.epsilon0, self.k) {
                    (Some(e), Some(e0), None) => {
                        if !(e > 0.0 && e < 1.0 && e0 > 0.0 && e0 < 1.0) {
                            return Err(bad("eps and eps0 must lie in (0, 1)".into()));
                        }
                        self.k = Some((-e0).ln_1p() / (-e).ln_1p());
                    }
                    (Some(e), _, Some(k)) => {
                        let e0 = inverse_breakdown_mapping(e, k)?;
                        if self.epsilon0.is_some_and(|x| (x - e0).abs() > 1e-12) {
                            return Err(bad("eps, eps0 and k are inconsistent".into()));
                        }
                        self.epsilon0 = Some(e0);
                    }
                    (None, Some(e0), Some(k)) => self.epsilon = Some(breakdown_mapping(e0, k)?),
                    _ => return Err(bad("give two of eps, eps0, k".into())),
                }
                self.kernel(0)?;
                robloc::kernels::inner_trim(inner, &self.trim()?, self.k.unwrap())?;
            }
            Kind::Mom => {
                let k = self.k.ok_or_else(|| bad("needs k".into()))?;
                if !(k >= 1.0 && k.fract() == 0.0) {
                    return Err(bad(format!("block size k = {k} must be a positive integer")));
                }
            }
            Kind::Morm => {
                let k = self.k.ok_or_else(|| bad("needs k".into()))?;
                if !(k >= 1.0 && k.fract() == 0.0) {
                    return Err(bad(format!("block size k = {k} must be a positive integer")));
                }
            }
        }
        Ok(self)
    }

    fn trim(&self) -> Result<TrimSpec> {
        let t = TrimSpec::new(self.epsilon.unwrap_or(0.0), self.gamma)?
            .with_nu(self.nu)?
            .with_strata(self.strata)?;
        Ok(t)
    }

    fn kernel(&self, seed: u64) -> Result<KernelSpec> {
        let mut spec = KernelSpec::new(self.k.unwrap_or(1.0))?.with_seed(seed).with_stream(self.stream).with_mode(self.mode);
        if let Some(w) = &self.weights {
            spec = spec.with_weights(w.clone())?;
        }
        if let Some(b) = self.budget {
            spec = spec.with_budget(b)?;
        }
        Ok(spec)
    }

    /// Overall (upper) breakdown point.
    pub fn breakdown(&self) -> Result<f64> {
        Ok(match self.kind {
            Kind::L(est) => est.breakdown(&self.trim()?),
            Kind::Whl(_) => breakdown_mapping(self.epsilon0.unwrap(), self.k.unwrap())?,
            // Median of n/k block means: a block breaks with one bad point.
            Kind::Mom | Kind::Morm => {
                let k = self.k.unwrap();
                breakdown_mapping(1.0 / (1.0 + self.gamma), k)?
            }
        })
    }

    /// Sample-size dependent preconditions (block geometry and the like).
    pub fn check_n(&self, n: usize) -> Result<()> {
        match self.kind {
            Kind::L(est) => {
                est.profile(n, &self.trim()?, self.conv)?;
            }
            Kind::Mom | Kind::Morm => {
                let k = self.k.unwrap() as usize;
                if k > n {
                    return Err(config(format!("block size {k} exceeds n = {n}")));
                }
            }
            Kind::Whl(_) => {
                if self.k.unwrap() > n as f64 {
                    return Err(config(format!("kernel order exceeds n = {n}")));
                }
            }
        }
        Ok(())
    }

    pub fn estimate(&self, s: &SortedSample, seed: u64) -> Result<Estimate> {
        let value = match self.kind {
            Kind::L(LEstimator::Mean) => mean(s),
            Kind::L(LEstimator::Median) => median(s),
            Kind::L(est) => est.estimate(s, &self.trim()?, self.conv, FractionalMode::Weighted)?,
            Kind::Whl(inner) => {
                let (v, seq) =
                    weighted_hl_mean_with_sequence(s, &self.kernel(seed)?, inner, &self.trim()?, self.conv)?;
                let se = if seq.exhaustive {
                    None
                } else if inner == LEstimator::Median {
                    Some(seq.quantile_se(0.5)?)
                } else {
                    None
                };
                return Ok(Estimate { value: v, se });
            }
            Kind::Mom => gamma_median_of_means(
                s.values(),
                self.k.unwrap() as usize,
                self.gamma,
                Partition::Shuffled(seed),
            )?,
            Kind::Morm => {
                let k = self.k.unwrap() as usize;
                let b = self.blocks.unwrap_or_else(|| (s.len() / k).max(1));
                median_of_randomized_means(s.values(), k, b, seed)?
            }
        };
        Ok(Estimate { value, se: None })
    }

    /// Display name: the label when present, else the canonical spec.
    pub fn name(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.to_string())
    }
}

impl fmt::Display for EstimatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = self.kind.id().to_string();
        if let Some(e) = self.epsilon {
            let _ = write!(s, ":eps={e}");
        }
        if self.gamma != 1.0 {
            let _ = write!(s, ":gamma={}", self.gamma);
        }
        match self.kind {
            Kind::L(LEstimator::Binomial) => {
                let _ = write!(s, ":nu={}", self.nu);
            }
            Kind::L(LEstimator::Stratified) => {
                let _ = write!(s, ":b={}", self.strata);
            }
            _ => {}
        }
        if let Some(k) = self.k {
            let _ = write!(s, ":k={k}");
        }
        if let Some(b) = self.budget {
            let _ = write!(s, ":budget={b}");
        }
        if let Some(w) = &self.weights {
            let w: Vec<String> = w.iter().map(|x| x.to_string()).collect();
            let _ = write!(s, ":w={}", w.join("|"));
        }
        if self.stream == IndexStream::Quasi {
            s.push_str(":stream=quasi");
        }
        match self.mode {
            KernelMode::Exact => s.push_str(":mode=exact"),
            KernelMode::Bootstrap => s.push_str(":mode=bootstrap"),
            KernelMode::Auto => {}
        }
        if self.conv == QuantileConvention::Midpoint {
            s.push_str(":conv=midpoint");
        }
        if let Some(b) = self.blocks {
            let _ = write!(s, ":blocks={b}");
        }
        f.write_str(&s)
    }
}

/// Parse a comma-separated roster; `standard` expands to the ε = 1/8 roster.
pub fn parse_roster(items: &[String]) -> Result<Vec<EstimatorSpec>> {
    let mut out = Vec::new();
    for it in items {
        if it.eq_ignore_ascii_case("standard") {
            out.extend(standard_roster()?);
        } else {
            out.push(EstimatorSpec::parse(it)?);
        }
    }
    if out.is_empty() {
        return Err(config("empty roster"));
    }
    Ok(out)
}

/// The twelve ε = 1/8 estimators, checked for matching breakdown points.
pub fn standard_roster() -> Result<Vec<EstimatorSpec>> {
    let ln = f64::ln;
    let denom = 3.0 * ln(2.0) - ln(7.0);
    let k_sq = (2.0 * ln(2.0) - ln(3.0)) / denom;
    let k_m = ln(2.0) / denom;
    let specs = [
        ("STM", "tm:eps=1/8".to_string()),
        ("SWM", "wm:eps=1/8".to_string()),
        ("BWM", "bwm:eps=1/8".to_string()),
        ("BM2", "bm:eps=1/8:nu=2".to_string()),
        ("BM3", "bm:eps=1/8:nu=3".to_string()),
        ("SQM", "sqm:eps=1/8".to_string()),
        ("THLM2", "thlm:eps=1/8:k=2".to_string()),
        ("WiHLM2", "wihlm:eps=1/8:k=2".to_string()),
        ("SQHLM", format!("sqhlm:eps=1/8:k={k_sq}")),
        ("mHLM", format!("mhlm:eps=1/8:k={k_m}")),
        ("THLM5", "thlm:eps=1/8:k=5".to_string()),
        ("WiHLM5", "wihlm:eps=1/8:k=5".to_string()),
    ];
    let mut out = Vec::with_capacity(specs.len());
    for (label, s) in specs {
        let mut e = EstimatorSpec::parse(&s)?;
        e.label = Some(label.to_string());
        let bd = e.breakdown()?;
        if (bd - STANDARD_EPSILON).abs() > 1e-12 {
            return Err(config(format!("{label}: breakdown {bd} differs from 1/8")));
        }
        out.push(e);
    }
    Ok(out)
}
