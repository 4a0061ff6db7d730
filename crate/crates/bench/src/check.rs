//! The `orderliness` subcommand: verdict plus per-violation rows.

use robloc::distmodel::{DistributionSpec, QuantileModel};
use robloc::orderliness::{
    check_nu_gamma_orderliness, check_u_orderliness, check_weighted_inequality, GridSpec,
    InequalityTarget, OrderlinessReport, QuantileTable,
};

use crate::error::{config, Result};
use crate::output::num;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Check {
    Orderliness,
    Inequality(InequalityTarget),
    U,
}

impl std::str::FromStr for Check {
    type Err = crate::error::BenchError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "orderliness" => Ok(Check::Orderliness),
            "u" => Ok(Check::U),
            other => other
                .parse::<InequalityTarget>()
                .map(Check::Inequality)
                .map_err(|_| config(format!("unknown check '{other}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Model {
    Parametric(DistributionSpec),
    Table(QuantileTable),
}

#[derive(Debug, Clone)]
pub struct CheckConfig {
    pub model: Model,
    pub check: Check,
    pub nu: u32,
    pub gamma: f64,
    pub grid: GridSpec,
    pub tol: Option<f64>,
    pub k_list: Vec<f64>,
    pub n: usize,
    pub budget: usize,
    pub seed: u64,
}

/// Default grid, narrowed for a tabulated model so that γε and 1 − ε stay
/// inside the tabulated probabilities.
pub fn grid_for(model: &Model, gamma: f64, points: usize) -> GridSpec {
    let mut g = GridSpec::default().with_points(points);
    if let Model::Table(t) = model {
        let (lo, hi) = t.range();
        let mut e = (1.0 - hi) * (1.0 + 1e-9);
        if gamma > 0.0 {
            e = e.max(lo / gamma * (1.0 + 1e-9));
        }
        g.eps_min = g.eps_min.max(e);
        g.tail = false;
    }
    g
}

pub fn run_check(cfg: &CheckConfig) -> Result<OrderlinessReport> {
    let m: &dyn QuantileModel = match &cfg.model {
        Model::Parametric(d) => d,
        Model::Table(t) => t,
    };
    Ok(match cfg.check {
        Check::Orderliness => check_nu_gamma_orderliness(m, cfg.nu, cfg.gamma, &cfg.grid, cfg.tol)?,
        Check::Inequality(t) => check_weighted_inequality(m, t, cfg.gamma, &cfg.grid, cfg.tol)?,
        Check::U => {
            let Model::Parametric(d) = &cfg.model else {
                return Err(config("the U check needs a parametric family"));
            };
            check_u_orderliness(d, cfg.gamma, &cfg.k_list, cfg.n, cfg.budget, cfg.seed)?
        }
    })
}

/// Summary comment plus rows: violations, or (k, value, se) for the U check.
pub fn report_table(rep: &OrderlinessReport) -> (Vec<String>, Vec<&'static str>, Vec<Vec<String>>) {
    let mut comments = vec![format!("verdict: {rep}")];
    if rep.skipped > 0 {
        comments.push(format!("skipped grid points: {}", rep.skipped));
    }
    if let Some(t) = rep.trend {
        comments.push(format!("trend: {t}"));
    }
    if !rep.u_points.is_empty() {
        let rows = rep
            .u_points
            .iter()
            .map(|p| vec![num(Some(p.k)), num(Some(p.value)), num(Some(p.se))])
            .collect();
        return (comments, vec!["k", "value", "se"], rows);
    }
    let rows = rep
        .violations
        .iter()
        .map(|v| vec![num(Some(v.at)), v.order.to_string(), num(Some(v.residual))])
        .collect();
    (comments, vec!["at", "order", "residual"], rows)
}
