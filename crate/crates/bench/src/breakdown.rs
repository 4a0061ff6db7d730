use robloc::distmodel::{draw_sample, DistributionSpec, SampleMode};
use robloc::estimators::SortedSample;

use crate::error::{config, Result};
use crate::output::num;
use crate::roster::EstimatorSpec;

/// |estimate| beyond this counts as broken.
pub const BREAK_THRESHOLD: f64 = 1e6;
pub const DEFAULT_MAGNITUDE: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct BreakdownConfig {
    pub estimator: EstimatorSpec,
    pub dist: DistributionSpec,
    pub n: usize,
    pub fractions: Vec<f64>,
    pub magnitude: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BreakdownRow {
    pub fraction: f64,
    pub replaced: usize,
    pub estimate: f64,
    pub broken: bool,
}

/// Replace the top ⌊c·n⌋ values with +magnitude, for each fraction c.
pub fn run_breakdown_probe(cfg: &BreakdownConfig) -> Result<Vec<BreakdownRow>> {
    if cfg.fractions.iter().any(|c| !(0.0..=0.5).contains(c)) {
        return Err(config("contamination fractions must lie in [0, 0.5]"));
    }
    if cfg.n < 2 {
        return Err(config("n must be >= 2"));
    }
    cfg.estimator.check_n(cfg.n)?;
    let clean = draw_sample(&cfg.dist, cfg.n, SampleMode::Pseudo, cfg.seed)?.values;
    let scale = clean.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if !(cfg.magnitude >= 1e3 * scale.max(1.0) && cfg.magnitude >= 1e3 * BREAK_THRESHOLD) {
        return Err(config(format!(
            "magnitude {} is not far above the sample scale {scale:.3e} and the break threshold",
            cfg.magnitude
        )));
    }
    cfg.fractions
        .iter()
        .map(|&c| {
            let m = (c * cfg.n as f64).floor() as usize;
            let mut v = clean.clone();
            for x in &mut v[cfg.n - m..] {
                *x = cfg.magnitude;
            }
            let est = cfg.estimator.estimate(&SortedSample::new(v)?, cfg.seed)?.value;
            Ok(BreakdownRow { fraction: c, replaced: m, estimate: est, broken: est.abs() > BREAK_THRESHOLD })
        })
        .collect()
}

/// Fraction of the first broken row, if any.
pub fn first_break(rows: &[BreakdownRow]) -> Option<f64> {
    rows.iter().find(|r| r.broken).map(|r| r.fraction)
}

pub const BREAKDOWN_COLUMNS: [&str; 8] =
    ["estimator", "n", "fraction", "replaced", "estimate", "broken", "first_break", "seed"];

pub fn breakdown_rows(cfg: &BreakdownConfig, rows: &[BreakdownRow]) -> Vec<Vec<String>> {
    let first = rows.iter().position(|r| r.broken);
    rows.iter()
        .enumerate()
        .map(|(i, r)| {
            vec![
                cfg.estimator.name(),
                cfg.n.to_string(),
                num(Some(r.fraction)),
                r.replaced.to_string(),
                num(Some(r.estimate)),
                r.broken.to_string(),
                (first == Some(i)).to_string(),
                cfg.seed.to_string(),
            ]
        })
        .collect()
}
