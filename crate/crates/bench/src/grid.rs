//! Family × (kurtosis | shape) grids shared by the sweep and SE study.

use robloc::distmodel::{solve_param_for_kurtosis, DistributionSpec, Family};

use crate::config::Config;
use crate::error::{config, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridPoint {
    Kurtosis(f64),
    Shape(f64),
    /// Shape-free family, standard parameters.
    Standard,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyGrid {
    pub family: Family,
    pub points: Vec<GridPoint>,
}

/// A grid point after resolution; `spec` is `Err(reason)` when infeasible.
#[derive(Debug, Clone)]
pub struct ResolvedPoint {
    pub family: Family,
    pub point: GridPoint,
    pub spec: std::result::Result<DistributionSpec, String>,
}

impl ResolvedPoint {
    pub fn shape(&self) -> Option<f64> {
        match (&self.spec, self.point) {
            (Ok(d), _) if self.family.has_shape() => Some(d.shape()),
            (Err(_), GridPoint::Shape(a)) => Some(a),
            _ => None,
        }
    }

    pub fn kurtosis(&self) -> Option<f64> {
        match &self.spec {
            Ok(d) => d.moment_summary().ok().map(|m| m.kurtosis),
            Err(_) => match self.point {
                GridPoint::Kurtosis(k) => Some(k),
                _ => None,
            },
        }
    }
}

/// Kurtosis points used when a family has no explicit grid.
pub fn default_kurtosis(family: Family) -> Vec<f64> {
    match family {
        Family::Pareto => vec![12.0, 18.0, 30.0],
        _ => vec![5.0, 9.0, 15.0],
    }
}

pub const DEFAULT_FAMILIES: [Family; 4] = [Family::Weibull, Family::Gamma, Family::Lognormal, Family::Pareto];

/// Reads `families`, `kurtosis.<family>` and `shape.<family>`.
pub fn from_config(c: &Config, default_families: &[Family]) -> Result<Vec<FamilyGrid>> {
    let families: Vec<Family> = match c.list("families") {
        Some(v) => v.iter().map(|s| s.parse::<Family>()).collect::<robloc::Result<_>>()?,
        None => default_families.to_vec(),
    };
    if families.is_empty() {
        return Err(config("no families"));
    }
    let mut out = Vec::new();
    for f in families {
        let kk = c.numbers(&format!("kurtosis.{}", f.name()))?;
        let ss = c.numbers(&format!("shape.{}", f.name()))?;
        let points = if !f.has_shape() {
            if kk.is_some() || ss.is_some() {
                return Err(config(format!("{f} has no shape parameter")));
            }
            vec![GridPoint::Standard]
        } else {
            match (kk, ss) {
                (Some(_), Some(_)) => {
                    return Err(config(format!("give kurtosis.{f} or shape.{f}, not both")))
                }
                (Some(k), None) => k.into_iter().map(GridPoint::Kurtosis).collect(),
                (None, Some(s)) => s.into_iter().map(GridPoint::Shape).collect(),
                (None, None) => default_kurtosis(f).into_iter().map(GridPoint::Kurtosis).collect(),
            }
        };
        out.push(FamilyGrid { family: f, points });
    }
    Ok(out)
}

pub fn resolve(grids: &[FamilyGrid]) -> Vec<ResolvedPoint> {
    let mut out = Vec::new();
    for g in grids {
        for &p in &g.points {
            let spec = match p {
                GridPoint::Kurtosis(k) => solve_param_for_kurtosis(g.family, k, 1.0),
                GridPoint::Shape(a) => DistributionSpec::new(g.family, a, 1.0, 0.0),
                GridPoint::Standard => DistributionSpec::new(g.family, 1.0, 1.0, 0.0),
            }
            .map_err(|e| e.to_string())
            .and_then(|d| match d.mean_sd() {
                Ok(_) => Ok(d),
                Err(e) => Err(e.to_string()),
            });
            out.push(ResolvedPoint { family: g.family, point: p, spec });
        }
    }
    out
}
