use rayon::prelude::*;
use robloc::distmodel::{draw_sample, SampleMode};
use robloc::estimators::SortedSample;

use crate::config::Config;
use crate::error::{config, Result};
use crate::grid::{self, FamilyGrid, ResolvedPoint, DEFAULT_FAMILIES};
use crate::output::ResultRow;
use crate::roster::{parse_roster, EstimatorSpec};

pub const DESK_N: usize = 100_000;
pub const PAPER_N: usize = 3_686_000;
pub const DESK_REPS: usize = 200;
pub const PAPER_REPS: usize = 1000;
pub const SE_STUDY_N: usize = 5184;

const SWEEP_KEYS: [&str; 9] =
    ["families", "kurtosis.", "shape.", "roster", "n", "mode", "seed", "se_reps", "paper_scale"];

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub grids: Vec<FamilyGrid>,
    pub roster: Vec<EstimatorSpec>,
    pub n: usize,
    pub mode: SampleMode,
    pub seed: u64,
    /// Pseudo-sample replicates behind the `se` column; 0 reports only the
    /// kernel bootstrap SE.
    pub se_reps: usize,
}

fn parse_mode(s: &str) -> Result<SampleMode> {
    match s {
        "quasi" => Ok(SampleMode::Quasi),
        "pseudo" => Ok(SampleMode::Pseudo),
        _ => Err(config(format!("mode must be quasi or pseudo, got '{s}'"))),
    }
}

pub(crate) fn roster_from(c: &Config) -> Result<Vec<EstimatorSpec>> {
    parse_roster(&c.list("roster").unwrap_or_else(|| vec!["standard".into()]))
}

impl SweepConfig {
    pub fn from_config(c: &Config) -> Result<Self> {
        c.check_keys(&SWEEP_KEYS)?;
        let paper = c.flag("paper_scale")?.unwrap_or(false);
        let cfg = Self {
            grids: grid::from_config(c, &DEFAULT_FAMILIES)?,
            roster: roster_from(c)?,
            n: c.count("n")?.unwrap_or(if paper { PAPER_N } else { DESK_N }),
            mode: c.get("mode").map(parse_mode).transpose()?.unwrap_or(SampleMode::Quasi),
            seed: c.count("seed")?.unwrap_or(0) as u64,
            se_reps: c.count("se_reps")?.unwrap_or(0),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(config("n must be >= 2"));
        }
        if self.se_reps == 1 {
            return Err(config("se_reps must be 0 or >= 2"));
        }
        for e in &self.roster {
            e.check_n(self.n).map_err(|err| config(format!("{}: {err}", e.name())))?;
        }
        Ok(())
    }
}

pub(crate) fn sd(xs: &[f64]) -> f64 {
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)).sqrt()
}

pub(crate) fn skip_row(p: &ResolvedPoint, e: &EstimatorSpec, n: usize, seed: u64, why: &str) -> ResultRow {
    ResultRow {
        family: p.family.name().into(),
        shape: p.shape(),
        kurtosis: p.kurtosis(),
        estimator: e.name(),
        epsilon: e.epsilon,
        gamma: e.gamma,
        k: e.k,
        n,
        estimate: None,
        std_bias: None,
        se: None,
        seed,
        note: format!("skip: {why}"),
    }
}

/// One quasi (or pseudo) sample per grid point, every roster entry on it.
pub fn run_bias_sweep(cfg: &SweepConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let points = grid::resolve(&cfg.grids);
    let m = cfg.roster.len();
    let mut rows = Vec::with_capacity(points.len() * m);
    for (pi, p) in points.iter().enumerate() {
        let dist = match &p.spec {
            Ok(d) => *d,
            Err(why) => {
                for (ei, e) in cfg.roster.iter().enumerate() {
                    rows.push(skip_row(p, e, cfg.n, cfg.seed ^ (pi * m + ei) as u64, why));
                }
                continue;
            }
        };
        let (mu, sigma) = dist.mean_sd()?;
        let sample =
            SortedSample::new(draw_sample(&dist, cfg.n, cfg.mode, cfg.seed ^ pi as u64)?.values)?;
        // Replicate samples are shared by all estimators at this point.
        let reps: Vec<SortedSample> = (0..cfg.se_reps)
            .into_par_iter()
            .map(|r| {
                let seed = cfg.seed ^ (((pi as u64 + 1) << 32) | r as u64);
                let v = draw_sample(&dist, cfg.n, SampleMode::Pseudo, seed)?.values;
                Ok(SortedSample::new(v)?)
            })
            .collect::<Result<_>>()?;
        for (ei, e) in cfg.roster.iter().enumerate() {
            let seed = cfg.seed ^ (pi * m + ei) as u64;
            let est = e.estimate(&sample, seed)?;
            let se = if reps.is_empty() {
                est.se
            } else {
                let vals = reps
                    .iter()
                    .enumerate()
                    .map(|(r, s)| Ok(e.estimate(s, seed ^ ((r as u64 + 1) << 32))?.value))
                    .collect::<Result<Vec<f64>>>()?;
                Some(sd(&vals))
            };
            rows.push(ResultRow {
                family: p.family.name().into(),
                shape: p.shape(),
                kurtosis: p.kurtosis(),
                estimator: e.name(),
                epsilon: e.epsilon,
                gamma: e.gamma,
                k: e.k,
                n: cfg.n,
                estimate: Some(est.value),
                std_bias: Some((est.value - mu) / sigma),
                se,
                seed,
                note: String::new(),
            });
        }
    }
    Ok(rows)
}

const SE_KEYS: [&str; 8] = ["families", "kurtosis.", "shape.", "roster", "n", "reps", "seed", "paper_scale"];

#[derive(Debug, Clone)]
pub struct SeStudyConfig {
    pub grids: Vec<FamilyGrid>,
    pub roster: Vec<EstimatorSpec>,
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
}

impl SeStudyConfig {
    pub fn from_config(c: &Config) -> Result<Self> {
        c.check_keys(&SE_KEYS)?;
        let paper = c.flag("paper_scale")?.unwrap_or(false);
        let cfg = Self {
            grids: grid::from_config(c, &DEFAULT_FAMILIES)?,
            roster: roster_from(c)?,
            n: c.count("n")?.unwrap_or(SE_STUDY_N),
            reps: c.count("reps")?.unwrap_or(if paper { PAPER_REPS } else { DESK_REPS }),
            seed: c.count("seed")?.unwrap_or(0) as u64,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps < 2 {
            return Err(config("reps must be >= 2"));
        }
        if self.n < 2 {
            return Err(config("n must be >= 2"));
        }
        for e in &self.roster {
            e.check_n(self.n).map_err(|err| config(format!("{}: {err}", e.name())))?;
        }
        Ok(())
    }
}

/// R pseudo samples per grid point; `estimate` is the replicate mean and
/// `se` the replicate standard deviation.
pub fn run_se_study(cfg: &SeStudyConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let points = grid::resolve(&cfg.grids);
    let m = cfg.roster.len();
    let mut rows = Vec::new();
    for (pi, p) in points.iter().enumerate() {
        let dist = match &p.spec {
            Ok(d) => *d,
            Err(why) => {
                for e in &cfg.roster {
                    rows.push(skip_row(p, e, cfg.n, cfg.seed, why));
                }
                continue;
            }
        };
        let (mu, sigma) = dist.mean_sd()?;
        // estimates[r][e]
        let estimates: Vec<Vec<f64>> = (0..cfg.reps)
            .into_par_iter()
            .map(|r| {
                let task = (pi * cfg.reps + r) as u64;
                let s = SortedSample::new(
                    draw_sample(&dist, cfg.n, SampleMode::Pseudo, cfg.seed ^ task)?.values,
                )?;
                cfg.roster
                    .iter()
                    .enumerate()
                    .map(|(ei, e)| Ok(e.estimate(&s, cfg.seed ^ (task * m as u64 + ei as u64))?.value))
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<_>>()?;
        for (ei, e) in cfg.roster.iter().enumerate() {
            let col: Vec<f64> = estimates.iter().map(|r| r[ei]).collect();
            let mean = col.iter().sum::<f64>() / col.len() as f64;
            rows.push(ResultRow {
                family: p.family.name().into(),
                shape: p.shape(),
                kurtosis: p.kurtosis(),
                estimator: e.name(),
                epsilon: e.epsilon,
                gamma: e.gamma,
                k: e.k,
                n: cfg.n,
                estimate: Some(mean),
                std_bias: Some((mean - mu) / sigma),
                se: Some(sd(&col)),
                seed: cfg.seed,
                note: format!("reps={}", cfg.reps),
            });
        }
    }
    Ok(rows)
}
