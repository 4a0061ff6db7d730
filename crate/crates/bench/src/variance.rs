use rayon::prelude::*;
use robloc::distmodel::{draw_sample, DistributionSpec, SampleMode};
use robloc::estimators::SortedSample;
use robloc::kernels::{gamma_median_of_means, median_hl_mean, KernelSpec, Partition};

use crate::error::{config, Result};
use crate::output::num;

#[derive(Debug, Clone, PartialEq)]
pub struct VarianceConfig {
    pub dist: DistributionSpec,
    pub k: usize,
    pub n: usize,
    pub reps: usize,
    /// Kernel bootstrap budget; `None` is the kernel default.
    pub budget: Option<usize>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarianceReport {
    pub mhlm: Vec<f64>,
    pub mom: Vec<f64>,
    pub var_mhlm: f64,
    pub var_mom: f64,
    /// Var(mHLM) / Var(MoM).
    pub ratio: f64,
}

fn var(xs: &[f64]) -> f64 {
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

impl VarianceConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || (self.k > 5 && self.k != self.n) {
            return Err(config(format!("k = {} must be small (1..=5) or equal to n", self.k)));
        }
        if self.k > self.n {
            return Err(config("k exceeds n"));
        }
        if self.reps < 100 {
            return Err(config(format!("reps = {} must be >= 100", self.reps)));
        }
        Ok(())
    }
}

/// mHLM_k and MoM_k (randomly shuffled blocks) on the same pseudo samples.
pub fn run_variance_compare(cfg: &VarianceConfig) -> Result<VarianceReport> {
    cfg.validate()?;
    let pairs: Vec<(f64, f64)> = (0..cfg.reps)
        .into_par_iter()
        .map(|r| {
            let seed = cfg.seed ^ r as u64;
            let s = SortedSample::new(draw_sample(&cfg.dist, cfg.n, SampleMode::Pseudo, seed)?.values)?;
            let mut spec = KernelSpec::new(cfg.k as f64)?.with_seed(seed);
            if let Some(b) = cfg.budget {
                spec = spec.with_budget(b)?;
            }
            let a = median_hl_mean(&s, &spec)?;
            let b = gamma_median_of_means(s.values(), cfg.k, 1.0, Partition::Shuffled(seed))?;
            Ok((a, b))
        })
        .collect::<Result<_>>()?;
    let (mhlm, mom): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let (var_mhlm, var_mom) = (var(&mhlm), var(&mom));
    Ok(VarianceReport { ratio: var_mhlm / var_mom, mhlm, mom, var_mhlm, var_mom })
}

pub const VARIANCE_COLUMNS: [&str; 9] =
    ["family", "shape", "k", "n", "replicate", "seed", "mhlm", "mom", "var_ratio"];

/// One row per replicate, then a `var` row holding both variances and the ratio.
pub fn variance_rows(cfg: &VarianceConfig, rep: &VarianceReport) -> Vec<Vec<String>> {
    let head = |r: String, seed: String| {
        vec![
            cfg.dist.family().name().to_string(),
            if cfg.dist.family().has_shape() { num(Some(cfg.dist.shape())) } else { String::new() },
            cfg.k.to_string(),
            cfg.n.to_string(),
            r,
            seed,
        ]
    };
    let mut rows: Vec<Vec<String>> = rep
        .mhlm
        .iter()
        .zip(&rep.mom)
        .enumerate()
        .map(|(r, (a, b))| {
            let mut v = head(r.to_string(), (cfg.seed ^ r as u64).to_string());
            v.extend([num(Some(*a)), num(Some(*b)), String::new()]);
            v
        })
        .collect();
    let mut last = head("var".into(), cfg.seed.to_string());
    last.extend([num(Some(rep.var_mhlm)), num(Some(rep.var_mom)), num(Some(rep.ratio))]);
    rows.push(last);
    rows
}
