//! Numerical checks of νth γ-orderliness and its consequences.
//!
//! The quantile average QA(ε, γ) = ½(Q(γε) + Q(1 − ε)) is sampled on an ε
//! grid, and sign conditions (−1)^j ∂^j QA/∂ε^j ≥ 0 (j = 1..ν) are tested
//! with divided differences. Each difference D = Σ cᵢ QA(εᵢ) is reported
//! normalised by Σ|cᵢ|, which puts every order on the QA scale: on a
//! uniform stencil it is Δ^j QA / 2^j. A point is a violation when
//! (−1)^j D/Σ|cᵢ| < −(tol + 16·ε_mach·max|QA|), so rounding noise in the
//! quantile function never counts as evidence.
//!
//! Higher orders use wider stencils: orders 1, 2, 3 and ≥ 4 use 1, 4, 32
//! and 128 grid steps (capped by the grid size). Without this, a fine grid
//! leaves the higher differences below rounding noise. A log-spaced tail
//! grid down to ε = 1e−8 probes the quantile singularity at the lower end.
//!
//! A "holds" verdict is a numerical certificate on the probed grid, not a
//! proof.

use std::fmt;

use rayon::prelude::*;

use crate::distmodel::{draw_sample, DistributionSpec, QuantileModel, SampleMode};
use crate::error::{domain, param, Error, Result};
use crate::estimators::{population_value, LEstimator, QaDefinition, SortedSample, TrimSpec};
use crate::kernels::{kernel_sequence, sparsity_se, KernelMode, KernelSpec};
use crate::numeric::integrate;

const TAIL_MIN: f64 = 1e-8;
const TAIL_POINTS: usize = 129;
const NOISE_ULPS: f64 = 16.0;
/// Bootstrap SE ceiling for the U-check, in sample standard deviations.
pub const U_SE_LIMIT: f64 = 0.01;
/// Significance for a step in the U-check, in combined SEs.
pub const U_Z: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub points: usize,
    pub eps_min: f64,
    /// Defaults to 1/(1+γ) − 1e−4.
    pub eps_max: Option<f64>,
    /// Base finite-difference step; defaults to the grid spacing.
    pub fd_step: Option<f64>,
    /// Also probe the log-spaced tail grid [1e−8, eps_min].
    pub tail: bool,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            points: 4096,
            eps_min: 1e-4,
            eps_max: None,
            fd_step: None,
            tail: true,
        }
    }
}

impl GridSpec {
    pub fn with_points(mut self, points: usize) -> Self {
        self.points = points;
        self
    }

    fn resolve(&self, gamma: f64) -> Result<(f64, f64)> {
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(param(format!("gamma = {gamma} must be finite and >= 0")));
        }
        let top = 1.0 / (1.0 + gamma);
        let hi = self.eps_max.unwrap_or(top - 1e-4);
        if self.points < 8 {
            return Err(Error::Resolution(format!("grid needs >= 8 points, got {}", self.points)));
        }
        if !(self.eps_min > 0.0 && self.eps_min < hi && hi <= top) {
            return Err(param(format!(
                "grid needs 0 < eps_min < eps_max <= 1/(1+gamma); got [{}, {hi}]",
                self.eps_min
            )));
        }
        if let Some(h) = self.fd_step {
            if !(h > 0.0) {
                return Err(param("fd_step must be positive"));
            }
        }
        Ok((self.eps_min, hi))
    }

    fn nodes(&self, lo: f64, hi: f64) -> Vec<f64> {
        let d = (hi - lo) / (self.points - 1) as f64;
        (0..self.points).map(|i| lo + i as f64 * d).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InequalityTarget {
    /// TM(ε, γ) nonincreasing in ε.
    TrimmingMonotone,
    /// QA ≥ TM.
    QaVsTm,
    /// WM ≥ TM.
    WmVsTm,
    /// WM ≥ BWM.
    WmVsBwm,
    /// SQM ≥ BM with ν = 2.
    SqmVsBm2,
}

impl InequalityTarget {
    pub const ALL: [InequalityTarget; 5] = [
        InequalityTarget::TrimmingMonotone,
        InequalityTarget::QaVsTm,
        InequalityTarget::WmVsTm,
        InequalityTarget::WmVsBwm,
        InequalityTarget::SqmVsBm2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InequalityTarget::TrimmingMonotone => "tm",
            InequalityTarget::QaVsTm => "qa_vs_tm",
            InequalityTarget::WmVsTm => "wm",
            InequalityTarget::WmVsBwm => "bwm",
            InequalityTarget::SqmVsBm2 => "sqm_vs_bm2",
        }
    }
}

impl std::str::FromStr for InequalityTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| param(format!("unknown inequality target '{s}'")))
    }
}

/// What a report's `at` coordinates and residuals refer to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CheckKind {
    /// Residuals in QA units; `at` is ε.
    Orderliness,
    /// Slack lhs − rhs; `at` is ε.
    Inequality(InequalityTarget),
    /// Step z-scores; `at` is the larger k of the step.
    UOrderliness,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub at: f64,
    pub order: u32,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UPoint {
    pub k: f64,
    pub value: f64,
    pub se: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderlinessReport {
    pub kind: CheckKind,
    pub nu: u32,
    pub gamma: f64,
    pub holds: bool,
    pub violations: Vec<Violation>,
    /// Smallest residual seen (0 when nothing was checked).
    pub worst_residual: f64,
    pub tolerance: f64,
    /// Checks performed.
    pub evaluated: usize,
    /// Grid points skipped because an estimator was undefined there.
    pub skipped: usize,
    /// U-check only: estimates per k.
    pub u_points: Vec<UPoint>,
    /// U-check only: +1 increasing, −1 decreasing, 0 flat.
    pub trend: Option<i8>,
}

impl fmt::Display for OrderlinessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({} checks, {} violations, worst residual {:.3e}, tol {:.3e})",
            if self.holds { "holds" } else { "violated" },
            self.evaluated,
            self.violations.len(),
            self.worst_residual,
            self.tolerance
        )
    }
}

fn quantile_at<M: QuantileModel + ?Sized>(m: &M, p: f64) -> Result<f64> {
    if p <= 0.5 {
        m.quantile(p)
    } else {
        m.quantile_upper(1.0 - p)
    }
}

/// QA(ε, γ) = ½(Q(γε) + Q(1 − ε)).
pub fn qa_value<M: QuantileModel + ?Sized>(m: &M, epsilon: f64, gamma: f64) -> Result<f64> {
    Ok(0.5 * (quantile_at(m, gamma * epsilon)? + m.quantile_upper(epsilon)?))
}

/// (ε, QA(ε, γ)) on the main grid.
pub fn qa_curve<M: QuantileModel + ?Sized>(m: &M, gamma: f64, grid: &GridSpec) -> Result<Vec<(f64, f64)>> {
    let (lo, hi) = grid.resolve(gamma)?;
    grid.nodes(lo, hi)
        .into_par_iter()
        .map(|e| Ok((e, qa_value(m, e, gamma)?)))
        .collect()
}

fn stride(order: u32) -> usize {
    match order {
        1 => 1,
        2 => 4,
        3 => 32,
        _ => 128,
    }
}

/// Normalised divided difference (Σ cᵢfᵢ / Σ|cᵢ|) and max |fᵢ|.
fn divided_difference(x: &[f64], f: &[f64]) -> (f64, f64) {
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..x.len() {
        let mut c = 1.0;
        for m in 0..x.len() {
            if m != i {
                c /= x[i] - x[m];
            }
        }
        num += c * f[i];
        den += c.abs();
    }
    (num / den, f.iter().fold(0.0f64, |a, v| a.max(v.abs())))
}

struct Stencil {
    at: f64,
    order: u32,
    nodes: Vec<f64>,
}

fn stencils(grid: &GridSpec, lo: f64, hi: f64, nu: u32) -> Vec<Stencil> {
    let main = grid.nodes(lo, hi);
    let base = grid.fd_step.unwrap_or((hi - lo) / (grid.points - 1) as f64);
    let mut out = Vec::new();
    if grid.tail && lo > TAIL_MIN {
        let r = (lo / TAIL_MIN).ln() / (TAIL_POINTS - 1) as f64;
        let tail: Vec<f64> = (0..TAIL_POINTS).map(|l| TAIL_MIN * (r * l as f64).exp()).collect();
        for j in 1..=nu {
            for w in tail[..TAIL_POINTS - 1].windows(j as usize + 1) {
                out.push(Stencil { at: w[0], order: j, nodes: w.to_vec() });
            }
        }
    }
    for j in 1..=nu {
        let cap = ((grid.points - 1) / (4 * j as usize)).max(1);
        let h = base * stride(j).min(cap) as f64;
        for &e in &main {
            let last = e + j as f64 * h;
            if last > hi * (1.0 + 1e-12) {
                break;
            }
            let nodes = (0..=j).map(|m| e + m as f64 * h).collect();
            out.push(Stencil { at: e + 0.5 * j as f64 * h, order: j, nodes });
        }
    }
    out.sort_by(|a, b| a.at.total_cmp(&b.at).then(a.order.cmp(&b.order)));
    out
}

/// Checks (−1)^j ∂^j QA/∂ε^j ≥ 0 for j = 1..ν. `tol` defaults to 1e−7 times
/// the range of QA over the grid.
pub fn check_nu_gamma_orderliness<M: QuantileModel + ?Sized>(
    m: &M,
    nu: u32,
    gamma: f64,
    grid: &GridSpec,
    tol: Option<f64>,
) -> Result<OrderlinessReport> {
    if nu == 0 {
        return Err(param("orderliness order nu must be >= 1"));
    }
    let (lo, hi) = grid.resolve(gamma)?;
    if grid.points < 4 * nu as usize {
        return Err(Error::Resolution(format!(
            "{} grid points cannot resolve order {nu} (need >= {})",
            grid.points,
            4 * nu
        )));
    }
    let tolerance = match tol {
        Some(t) if t >= 0.0 => t,
        Some(t) => return Err(param(format!("tolerance {t} must be >= 0"))),
        None => {
            let curve = qa_curve(m, gamma, grid)?;
            let (mn, mx) = curve
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &(_, v)| (a.min(v), b.max(v)));
            1e-7 * (mx - mn)
        }
    };
    let checks: Vec<Result<(f64, u32, f64, f64)>> = stencils(grid, lo, hi, nu)
        .into_par_iter()
        .map(|s| {
            let f = s.nodes.iter().map(|&e| qa_value(m, e, gamma)).collect::<Result<Vec<_>>>()?;
            let (d, fmax) = divided_difference(&s.nodes, &f);
            let sign = if s.order % 2 == 0 { 1.0 } else { -1.0 };
            Ok((s.at, s.order, sign * d, fmax))
        })
        .collect();
    let mut report = OrderlinessReport {
        kind: CheckKind::Orderliness,
        nu,
        gamma,
        holds: true,
        violations: Vec::new(),
        worst_residual: f64::INFINITY,
        tolerance,
        evaluated: checks.len(),
        skipped: 0,
        u_points: Vec::new(),
        trend: None,
    };
    for c in checks {
        let (at, order, r, fmax) = c?;
        report.worst_residual = report.worst_residual.min(r);
        if r < -(tolerance + NOISE_ULPS * f64::EPSILON * fmax) {
            report.violations.push(Violation { at, order, residual: r });
        }
    }
    report.holds = report.violations.is_empty();
    if report.evaluated == 0 {
        report.worst_residual = 0.0;
    }
    Ok(report)
}

fn inequality_grid(target: InequalityTarget, gamma: f64, grid: &GridSpec, lo: f64, hi: f64) -> Vec<f64> {
    match target {
        InequalityTarget::SqmVsBm2 => {
            // SQM needs 1/(4ε) integral.
            let m_lo = (0.25 / hi).ceil().max(1.0) as usize;
            let m_hi = (0.25 / lo).floor() as usize;
            let mut v: Vec<f64> = (m_lo..=m_hi).take(grid.points).map(|m| 0.25 / m as f64).collect();
            v.reverse();
            v
        }
        InequalityTarget::WmVsBwm => {
            let cap = 0.5 / (1.0 + gamma);
            grid.nodes(lo, hi.min(cap))
        }
        _ => grid.nodes(lo, hi),
    }
}

/// Population inequality checks on an ε grid. Population values are numeric
/// integrals of Q (relative tolerance 1e−10); `tol` defaults to 1e−9.
pub fn check_weighted_inequality<M: QuantileModel + ?Sized>(
    m: &M,
    target: InequalityTarget,
    gamma: f64,
    grid: &GridSpec,
    tol: Option<f64>,
) -> Result<OrderlinessReport> {
    let (lo, hi) = grid.resolve(gamma)?;
    let tolerance = tol.unwrap_or(1e-9);
    // The inequalities presume a finite mean; tables without tails skip this.
    match population_value(m, LEstimator::Mean, &TrimSpec::new(0.0, 1.0)?) {
        Err(e @ Error::MomentDivergence { .. }) => return Err(e),
        _ => {}
    }
    let eps = inequality_grid(target, gamma, grid, lo, hi);
    let pv = |est: LEstimator, t: &TrimSpec| population_value(m, est, t);
    // Some(slack), or None where an estimator is undefined at ε.
    let slack = |e: f64| -> Result<Option<f64>> {
        let t = TrimSpec::new(e, gamma)?;
        let pair = match target {
            InequalityTarget::TrimmingMonotone => return Ok(Some(pv(LEstimator::Trimmed, &t)?)),
            InequalityTarget::QaVsTm => {
                (pv(LEstimator::QuantileAverage(QaDefinition::Eq1), &t), pv(LEstimator::Trimmed, &t))
            }
            InequalityTarget::WmVsTm => (pv(LEstimator::Winsorized, &t), pv(LEstimator::Trimmed, &t)),
            InequalityTarget::WmVsBwm => (pv(LEstimator::Winsorized, &t), pv(LEstimator::BlockWinsorized, &t)),
            InequalityTarget::SqmVsBm2 => (
                pv(LEstimator::StratifiedQuantile, &t),
                pv(LEstimator::Binomial, &t.clone().with_nu(2)?),
            ),
        };
        match pair {
            (Ok(a), Ok(b)) => Ok(Some(a - b)),
            (Err(e), _) | (_, Err(e)) => match e {
                Error::Geometry(_) | Error::OverTrim(_) | Error::Parameter(_) => Ok(None),
                other => Err(other),
            },
        }
    };
    let values: Vec<Result<Option<f64>>> = eps.par_iter().map(|&e| slack(e)).collect();
    let mut points = Vec::with_capacity(eps.len());
    let mut skipped = 0;
    for (e, v) in eps.iter().zip(values) {
        match v? {
            Some(v) => points.push((*e, v)),
            None => skipped += 1,
        }
    }
    let residuals: Vec<(f64, f64)> = match target {
        // TM(ε_i) − TM(ε_{i+1}) ≥ 0
        InequalityTarget::TrimmingMonotone => points.windows(2).map(|w| (w[1].0, w[0].1 - w[1].1)).collect(),
        _ => points,
    };
    let mut report = OrderlinessReport {
        kind: CheckKind::Inequality(target),
        nu: 1,
        gamma,
        holds: true,
        violations: Vec::new(),
        worst_residual: f64::INFINITY,
        tolerance,
        evaluated: residuals.len(),
        skipped,
        u_points: Vec::new(),
        trend: None,
    };
    for (at, r) in residuals {
        report.worst_residual = report.worst_residual.min(r);
        if r < -tolerance {
            report.violations.push(Violation { at, order: 1, residual: r });
        }
    }
    report.holds = report.violations.is_empty();
    if report.evaluated == 0 {
        report.worst_residual = 0.0;
    }
    Ok(report)
}

/// γ-U-orderliness: the γ-median of the kernel sequence (the matched
/// breakdown QHLM with ε₀ = 1/(1+γ)) must move in a single direction across
/// `k_list`. Steps count only beyond [`U_Z`] combined SEs.
pub fn check_u_orderliness(
    dist: &DistributionSpec,
    gamma: f64,
    k_list: &[f64],
    n: usize,
    budget: usize,
    seed: u64,
) -> Result<OrderlinessReport> {
    if k_list.is_empty() {
        return Err(param("k_list is empty"));
    }
    if k_list.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(param("k_list must be strictly ascending"));
    }
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(param(format!("gamma = {gamma} must be finite and >= 0")));
    }
    let sample = SortedSample::new(draw_sample(dist, n, SampleMode::Quasi, seed)?.values)?;
    let xs = sample.values();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0)).sqrt();
    let p = gamma / (1.0 + gamma);
    let mut u_points = Vec::with_capacity(k_list.len());
    for &k in k_list {
        let spec = KernelSpec::new(k)?
            .with_budget(budget)?
            .with_seed(seed)
            .with_mode(KernelMode::Auto);
        let seq = kernel_sequence(&sample, &spec)?;
        let value = crate::estimators::empirical_quantile(
            &SortedSample::new(seq.values.clone())?,
            p,
            crate::estimators::QuantileConvention::Midpoint,
        )?;
        let se = sparsity_se(&seq.values, p.clamp(1e-9, 1.0 - 1e-9))?;
        if se > U_SE_LIMIT * sd {
            return Err(Error::Precision(format!(
                "kernel quantile SE {se:.3e} at k = {k} exceeds {U_SE_LIMIT} sd; raise n or budget"
            )));
        }
        u_points.push(UPoint { k, value, se });
    }
    let steps: Vec<(f64, f64)> = u_points
        .windows(2)
        .map(|w| {
            let se = (w[0].se.powi(2) + w[1].se.powi(2)).sqrt();
            let d = w[1].value - w[0].value;
            (w[1].k, if se > 0.0 { d / se } else if d == 0.0 { 0.0 } else { d.signum() * f64::INFINITY })
        })
        .collect();
    let up = steps.iter().filter(|s| s.1 > U_Z).count();
    let down = steps.iter().filter(|s| s.1 < -U_Z).count();
    let trend = match (up > 0, down > 0) {
        (true, false) => 1,
        (false, true) => -1,
        _ => 0,
    };
    let mut violations = Vec::new();
    if up > 0 && down > 0 {
        let minority_up = up < down;
        for &(k, z) in &steps {
            if (minority_up && z > U_Z) || (!minority_up && z < -U_Z) {
                violations.push(Violation { at: k, order: 1, residual: z });
            }
        }
    }
    Ok(OrderlinessReport {
        kind: CheckKind::UOrderliness,
        nu: 1,
        gamma,
        holds: violations.is_empty(),
        worst_residual: steps.iter().map(|s| -s.1.abs()).fold(0.0, f64::min),
        violations,
        tolerance: U_Z,
        evaluated: steps.len(),
        skipped: 0,
        u_points,
        trend: Some(trend),
    })
}

/// Density of the pairwise mean (X₁ + X₂)/2 for a distribution on [0, ∞):
/// ∫₀^{2x} 2 f(t) f(2x − t) dt.
pub fn hl2_density(dist: &DistributionSpec, x: f64) -> Result<f64> {
    let (lo, _) = dist.support();
    if lo < 0.0 {
        return Err(domain(format!("{} is not supported on [0, inf)", dist.family().name())));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(domain(format!("x = {x} must be finite and >= 0")));
    }
    if x <= lo {
        return Ok(0.0);
    }
    // Symmetric about t = x, so integrate the lower half twice.
    let g = |t: f64| 2.0 * dist.density(t) * dist.density(2.0 * x - t);
    Ok(2.0 * integrate(g, lo, x, 1e-10)?.value)
}

/// Tabulated quantile function with monotone cubic (PCHIP) interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileTable {
    p: Vec<f64>,
    q: Vec<f64>,
    slope: Vec<f64>,
}

impl QuantileTable {
    pub fn new(p: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        if p.len() != q.len() {
            return Err(param("p and Q columns differ in length"));
        }
        if p.len() < 2 {
            return Err(param("quantile table needs at least 2 rows"));
        }
        if p.iter().chain(&q).any(|v| !v.is_finite()) {
            return Err(param("quantile table has non-finite entries"));
        }
        if p[0] < 0.0 || p[p.len() - 1] > 1.0 {
            return Err(param("table probabilities must lie in [0, 1]"));
        }
        if let Some(i) = p.windows(2).position(|w| !(w[0] < w[1])) {
            return Err(param(format!("p must be strictly increasing (row {})", i + 2)));
        }
        if let Some(i) = q.windows(2).position(|w| w[0] > w[1]) {
            return Err(param(format!("Q must be nondecreasing (row {})", i + 2)));
        }
        let slope = pchip_slopes(&p, &q);
        Ok(Self { p, q, slope })
    }

    /// Two whitespace- or comma-separated columns `p Q(p)`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut p = Vec::new();
        let mut q = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
            if cols.len() != 2 {
                return Err(param(format!("line {}: expected 2 columns", ln + 1)));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| param(format!("line {}: bad number '{s}'", ln + 1)));
            p.push(num(cols[0])?);
            q.push(num(cols[1])?);
        }
        Self::new(p, q)
    }

    pub fn range(&self) -> (f64, f64) {
        (self.p[0], self.p[self.p.len() - 1])
    }

    fn eval(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.range();
        if !(x >= lo && x <= hi) {
            return Err(domain(format!("p = {x} outside table range [{lo}, {hi}]")));
        }
        let i = match self.p.partition_point(|&v| v <= x) {
            0 => 0,
            k => (k - 1).min(self.p.len() - 2),
        };
        let h = self.p[i + 1] - self.p[i];
        let s = (x - self.p[i]) / h;
        let (y0, y1) = (self.q[i], self.q[i + 1]);
        let (d0, d1) = (self.slope[i] * h, self.slope[i + 1] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        Ok((2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * d0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * d1)
    }
}

impl QuantileModel for QuantileTable {
    fn quantile(&self, p: f64) -> Result<f64> {
        self.eval(p)
    }

    fn quantile_upper(&self, q: f64) -> Result<f64> {
        self.eval(1.0 - q)
    }
}

/// Fritsch–Carlson slopes with the one-sided three-point end formula.
fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    if n == 2 {
        return vec![delta[0]; 2];
    }
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        if delta[i - 1] * delta[i] > 0.0 {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    let end = |h0: f64, h1: f64, m0: f64, m1: f64| {
        let mut e = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
        if e.signum() != m0.signum() {
            e = 0.0;
        } else if m0.signum() != m1.signum() && e.abs() > 3.0 * m0.abs() {
            e = 3.0 * m0;
        }
        e
    };
    d[0] = end(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = end(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}
