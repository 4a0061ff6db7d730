//! Estimator layouts in probability coordinates. A layout is a list of
//! uniform-density segments over [a, b] ⊂ [0, 1] and point masses at
//! quantile levels. Sample estimators scale it by n; population functionals
//! integrate the quantile function over it.

use super::profile::{ProfileBuilder, WeightProfile};
use super::QuantileConvention;
use crate::distmodel::QuantileModel;
use crate::error::{Error, Result};
use crate::numeric::{self, snap};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Piece {
    Segment { a: f64, b: f64, density: f64 },
    Quantile { p: f64, mass: f64 },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub(crate) struct Layout {
    pub pieces: Vec<Piece>,
}

impl Layout {
    pub fn segment(&mut self, a: f64, b: f64, density: f64) {
        self.pieces.push(Piece::Segment { a, b, density });
    }

    pub fn quantile(&mut self, p: f64, mass: f64) {
        self.pieces.push(Piece::Quantile { p, mass });
    }

    /// A block of the quantile-average domain: u ∈ [u1, u2] contributes
    /// w·½(Q(γu) + Q(1 − u)) du.
    pub fn qa_block(&mut self, u1: f64, u2: f64, w: f64, gamma: f64) {
        if w == 0.0 || u2 <= u1 {
            return;
        }
        if gamma > 0.0 {
            self.segment(gamma * u1, gamma * u2, w / (2.0 * gamma));
        } else {
            self.quantile(0.0, w * (u2 - u1) / 2.0);
        }
        self.segment(1.0 - u2, 1.0 - u1, w / 2.0);
    }

    /// Segment endpoints in order-statistic coordinates for sample size n.
    pub fn boundaries(&self, n: usize) -> Vec<f64> {
        let nf = n as f64;
        self.pieces
            .iter()
            .flat_map(|p| match *p {
                Piece::Segment { a, b, .. } => vec![snap(nf * a), snap(nf * b)],
                Piece::Quantile { .. } => vec![],
            })
            .collect()
    }

    pub fn profile(&self, n: usize, conv: QuantileConvention) -> WeightProfile {
        let nf = n as f64;
        let mut b = ProfileBuilder::new(n);
        for piece in &self.pieces {
            match *piece {
                Piece::Segment { a, b: hi, density } => {
                    b.segment(snap(nf * a), snap(nf * hi), density);
                }
                Piece::Quantile { p, mass } => {
                    for (idx, share) in quantile_indices(n, p, conv) {
                        b.mass(idx, mass * nf * share);
                    }
                }
            }
        }
        b.build()
    }

    /// Population value: ∫ over segments of Q plus point-mass quantiles,
    /// normalised by total weight.
    pub fn population<M: QuantileModel + ?Sized>(&self, dist: &M, rel_tol: f64) -> Result<f64> {
        let mut num = 0.0;
        let mut den = 0.0;
        for piece in &self.pieces {
            match *piece {
                Piece::Segment { a, b, density } => {
                    if b > a {
                        num += density * integrate_quantile(dist, a, b, rel_tol)?;
                        den += density * (b - a);
                    }
                }
                Piece::Quantile { p, mass } => {
                    num += mass * population_quantile(dist, p)?;
                    den += mass;
                }
            }
        }
        Ok(num / den)
    }
}

/// Element(s) (0-based) and shares that an empirical quantile at level p uses.
pub(crate) fn quantile_indices(n: usize, p: f64, conv: QuantileConvention) -> Vec<(usize, f64)> {
    let t = snap(n as f64 * p);
    let ceil = (t.ceil() as usize).clamp(1, n);
    match conv {
        QuantileConvention::Midpoint if t.fract() == 0.0 && t >= 1.0 && (t as usize) < n => {
            let i = t as usize;
            vec![(i - 1, 0.5), (i, 0.5)]
        }
        _ => vec![(ceil - 1, 1.0)],
    }
}

/// Q(p) evaluated through the upper branch above 1/2.
pub(crate) fn population_quantile<M: QuantileModel + ?Sized>(dist: &M, p: f64) -> Result<f64> {
    if p <= 0.5 {
        dist.quantile(p)
    } else {
        dist.quantile_upper(1.0 - p)
    }
}

const END_DELTA: f64 = 1e-13;

/// ∫_a^b Q(p) dp, split at 1/2 so the upper half integrates in q = 1 − p.
/// An open endpoint at 0 or 1 with an unbounded quantile gets a power-law
/// tail correction; a non-integrable tail is a moment-divergence error.
pub(crate) fn integrate_quantile<M: QuantileModel + ?Sized>(dist: &M, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    let mut total = 0.0;
    if a < 0.5 {
        let hi = b.min(0.5);
        total += half_integral(|p| dist.quantile(p), a, hi, rel_tol)?;
    }
    if b > 0.5 {
        let lo = a.max(0.5);
        // q runs over [1 − b, 1 − lo].
        total += half_integral(|q| dist.quantile_upper(q), 1.0 - b, 1.0 - lo, rel_tol)?;
    }
    Ok(total)
}

fn half_integral<F: Fn(f64) -> Result<f64>>(g: F, lo: f64, hi: f64, rel_tol: f64) -> Result<f64> {
    if hi <= lo {
        return Ok(0.0);
    }
    let eval = |x: f64| g(x).unwrap_or(f64::NAN);
    if lo > 0.0 || g(0.0).is_ok() {
        let abs = 1e-15 * (eval(0.5 * (lo + hi)).abs() + 1.0) * (hi - lo);
        return Ok(numeric::integrate_abs(eval, lo, hi, rel_tol, abs)?.value);
    }
    let d = END_DELTA.min(0.5 * hi);
    let abs = 1e-15 * (eval(0.5 * (d + hi)).abs() + 1.0) * (hi - d);
    let body = numeric::integrate_abs(eval, d, hi, rel_tol, abs)?.value;
    let (g1, g10) = (eval(d), eval(10.0 * d));
    let tail = if g1.signum() == g10.signum() && g1 != 0.0 && g10 != 0.0 {
        let e = (g1 / g10).ln() / std::f64::consts::LN_10;
        if e >= 0.999 {
            return Err(Error::MomentDivergence { order: 1 });
        }
        g1 * d / (1.0 - e)
    } else {
        g1 * d
    };
    Ok(body + tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distmodel::DistributionSpec;

    #[test]
    fn quantile_conventions() {
        use QuantileConvention::*;
        assert_eq!(quantile_indices(5, 0.8, Ceiling), vec![(3, 1.0)]);
        assert_eq!(quantile_indices(5, 0.2, Ceiling), vec![(0, 1.0)]);
        assert_eq!(quantile_indices(5, 0.0, Ceiling), vec![(0, 1.0)]);
        assert_eq!(quantile_indices(5, 1.0, Midpoint), vec![(4, 1.0)]);
        assert_eq!(quantile_indices(4, 0.5, Midpoint), vec![(1, 0.5), (2, 0.5)]);
        assert_eq!(quantile_indices(5, 0.5, Midpoint), vec![(2, 1.0)]);
    }

    #[test]
    fn exponential_partial_means() {
        let e = DistributionSpec::exponential(1.0).unwrap();
        // ∫_0^a −ln(1−u) du = (1−a)ln(1−a) + a
        let a: f64 = 0.5;
        let want = (1.0 - a) * (1.0 - a).ln() + a;
        let got = integrate_quantile(&e, 0.0, a, 1e-12).unwrap();
        assert!((got - want).abs() < 1e-12);
        let full = integrate_quantile(&e, 0.0, 1.0, 1e-12).unwrap();
        assert!((full - 1.0).abs() < 1e-9, "{full}");
        let g = DistributionSpec::gaussian(0.0, 1.0).unwrap();
        assert!(integrate_quantile(&g, 0.0, 1.0, 1e-12).unwrap().abs() < 1e-9);
        let p = DistributionSpec::pareto(1.0, 1.0).unwrap();
        assert!(matches!(integrate_quantile(&p, 0.2, 1.0, 1e-10), Err(Error::MomentDivergence { .. })));
    }
}
