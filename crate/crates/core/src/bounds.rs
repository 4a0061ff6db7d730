//! Closed-form bias and concentration bounds. Bias bounds are for the
//! standardized family (μ = 0, σ = 1), so a bound of b means QA − μ ≤ bσ.

use std::f64::consts::E;

use crate::error::{domain, param, Error, Result};

/// A bound that may be infinite, e.g. at ε = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    Finite(f64),
    Infinite,
}

impl Bound {
    pub fn value(self) -> f64 {
        match self {
            Bound::Finite(v) => v,
            Bound::Infinite => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Bound::Finite(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundQuery {
    pub epsilon: f64,
    pub gamma: f64,
    pub k: f64,
    /// Deviation in units of σ/√k.
    pub t: f64,
    pub n: usize,
    pub sigma: f64,
}

fn check_eps_gamma(epsilon: f64, gamma: f64) -> Result<()> {
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(param(format!("gamma = {gamma} must be finite and >= 0")));
    }
    if !(0.0..=1.0 / (1.0 + gamma)).contains(&epsilon) {
        return Err(domain(format!("epsilon = {epsilon} outside [0, 1/(1+gamma)]")));
    }
    Ok(())
}

fn lower_term(gamma: f64, epsilon: f64) -> f64 {
    let ge = gamma * epsilon;
    (ge / (1.0 - ge)).sqrt()
}

/// sup QA over all distributions with finite variance:
/// ½(√(γε/(1−γε)) + √((1−ε)/ε)).
pub fn sup_qa_general(epsilon: f64, gamma: f64) -> Result<Bound> {
    check_eps_gamma(epsilon, gamma)?;
    if gamma * epsilon >= 1.0 {
        return Err(domain("gamma * epsilon must be < 1"));
    }
    if epsilon == 0.0 {
        return Ok(Bound::Infinite);
    }
    Ok(Bound::Finite(0.5 * (lower_term(gamma, epsilon) + ((1.0 - epsilon) / epsilon).sqrt())))
}

fn unimodal_lower(gamma: f64, epsilon: f64) -> f64 {
    let g = 3.0 * gamma * epsilon;
    (g / (4.0 - g)).sqrt()
}

/// Branch for ε ≤ 1/6.
pub fn sup_qa_unimodal_branch1(epsilon: f64, gamma: f64) -> f64 {
    0.5 * ((4.0 / (9.0 * epsilon) - 1.0).sqrt() + unimodal_lower(gamma, epsilon))
}

/// Branch for 1/6 < ε ≤ 1/(1+γ).
pub fn sup_qa_unimodal_branch2(epsilon: f64, gamma: f64) -> f64 {
    let r = 3.0 * (1.0 - epsilon);
    0.5 * ((r / (4.0 - r)).sqrt() + unimodal_lower(gamma, epsilon))
}

/// sup QA over unimodal distributions, 0 ≤ γ < 5.
pub fn sup_qa_unimodal(epsilon: f64, gamma: f64) -> Result<Bound> {
    check_eps_gamma(epsilon, gamma)?;
    if gamma >= 5.0 {
        return Err(param(format!(
            "unimodal bound for gamma = {gamma} >= 5 needs a branch that is not implemented"
        )));
    }
    if epsilon == 0.0 {
        return Ok(Bound::Infinite);
    }
    Ok(Bound::Finite(if epsilon <= 1.0 / 6.0 {
        sup_qa_unimodal_branch1(epsilon, gamma)
    } else {
        sup_qa_unimodal_branch2(epsilon, gamma)
    }))
}

/// P(γmoM − μ ≥ tσ/√k) ≤ exp(−(2n/k)(1/(1+γ) − 1/(k+t²))²).
pub fn concentration_bound(q: &BoundQuery) -> Result<f64> {
    if !(q.k >= 1.0) || !q.k.is_finite() {
        return Err(param(format!("k = {} must be >= 1", q.k)));
    }
    if (q.n as f64) < q.k {
        return Err(param(format!("n = {} must be >= k = {}", q.n, q.k)));
    }
    if !(q.gamma >= 0.0) || !q.t.is_finite() {
        return Err(param("gamma must be >= 0 and t finite"));
    }
    let d = 1.0 / (1.0 + q.gamma) - 1.0 / (q.k + q.t * q.t);
    Ok((-(2.0 * q.n as f64 / q.k) * d * d).exp())
}

/// Range of k over which [`concentration_bound`] is nonincreasing in k.
pub fn monotone_k_interval(gamma: f64, t: f64) -> Result<(f64, f64)> {
    if !(gamma >= 0.0) || !gamma.is_finite() || !t.is_finite() {
        return Err(param("gamma must be finite and >= 0, t finite"));
    }
    let t2 = t * t;
    if t2 >= gamma + 1.0 {
        return Err(domain(format!("empty interval: t^2 = {t2} >= gamma + 1 = {}", gamma + 1.0)));
    }
    let g = gamma;
    let disc = 9.0 * g * g + 18.0 * g - 8.0 * g * t2 - 8.0 * t2 + 9.0;
    Ok((g - t2 + 1.0, 0.5 * disc.sqrt() + 0.5 * (3.0 * g - 2.0 * t2 + 3.0)))
}

/// Conservative asymptotic bias bound of γmoM: √(γ/k)·σ.
pub fn gamma_mom_bias_bound(k: f64, gamma: f64, sigma: f64) -> Result<f64> {
    if !(k >= 1.0) || !(gamma >= 0.0) || !(sigma > 0.0) {
        return Err(param("need k >= 1, gamma >= 0, sigma > 0"));
    }
    Ok((gamma / k).sqrt() * sigma)
}

/// Lower branch W₋₁ on [−1/e, 0), by Halley iteration.
pub fn lambert_w_minus1(x: f64) -> Result<f64> {
    let branch = -1.0 / E;
    if !(x >= branch && x < 0.0) {
        return Err(domain(format!("W_-1 defined on [-1/e, 0), got {x}")));
    }
    let p2 = 2.0 * (1.0 + E * x);
    if p2 <= 0.0 {
        return Ok(-1.0);
    }
    let mut w = if x < -0.25 {
        let p = p2.sqrt();
        -1.0 - p - p * p / 3.0 - 11.0 / 72.0 * p * p * p
    } else {
        let l1 = (-x).ln();
        let l2 = (-l1).ln();
        l1 - l2 + l2 / l1
    };
    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if f.abs() <= 2.0 * f64::EPSILON * x.abs() || wp1 == 0.0 {
            return Ok(w);
        }
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * w.abs() {
            return Ok(w);
        }
    }
    Err(Error::Convergence(format!("W_-1({x})")))
}

/// E[H-L] for an exponential of scale λ: (−W₋₁(−1/(2e)) − 1)/2 · λ.
pub fn expected_hl_exponential(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(domain(format!("lambda = {lambda} must be > 0")));
    }
    let w = lambert_w_minus1(-0.5 / E)?;
    Ok((-w - 1.0) / 2.0 * lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::integrate;

    #[test]
    fn general_examples() {
        assert!((sup_qa_general(0.5, 1.0).unwrap().value() - 1.0).abs() < 1e-15);
        let want = 0.5 * (1.0 / (2.0 * 2f64.sqrt()) + 2.0 * 2f64.sqrt());
        assert!((sup_qa_general(1.0 / 9.0, 1.0).unwrap().value() - want).abs() < 1e-14);
        assert!((want - 1.59099).abs() < 1e-5);
        assert_eq!(sup_qa_general(0.0, 1.0).unwrap(), Bound::Infinite);
        let e = 1e-10;
        let v = sup_qa_general(e, 0.0).unwrap().value();
        assert!((v / (0.5 / e.sqrt()) - 1.0).abs() < 1e-9);
        assert!(sup_qa_general(0.6, 1.0).is_err());
    }

    #[test]
    fn unimodal_examples() {
        let want = 0.5 * ((5.0f64 / 3.0).sqrt() + (1.0f64 / 7.0).sqrt());
        assert!((sup_qa_unimodal_branch1(1.0 / 6.0, 1.0) - want).abs() < 1e-15);
        assert!((sup_qa_unimodal_branch2(1.0 / 6.0, 1.0) - want).abs() < 1e-15);
        assert!((want - 0.83448).abs() < 1e-5);
        let v = sup_qa_unimodal(0.5, 1.0).unwrap().value();
        assert!((v - 0.6f64.sqrt()).abs() < 1e-15);
        assert!(matches!(sup_qa_unimodal(0.1, 5.0), Err(Error::Parameter(_))));
        assert_eq!(sup_qa_unimodal(0.0, 0.5).unwrap(), Bound::Infinite);
    }

    #[test]
    fn concentration_examples() {
        let q = |k, gamma, t, n| BoundQuery { epsilon: 0.0, gamma, k, t, n, sigma: 1.0 };
        assert_eq!(concentration_bound(&q(2.0, 1.0, 0.0, 50)).unwrap(), 1.0);
        let v = concentration_bound(&q(2.0, 1.0, 1.0, 200)).unwrap();
        assert!((v - (-200.0f64 / 36.0).exp()).abs() < 1e-15);
        assert!((v - 0.003866).abs() < 1e-6);
        // k → ∞ with n = c·k
        let c = 3.0;
        let k = 1e9;
        let v = concentration_bound(&q(k, 1.0, 2.0, (c * k) as usize)).unwrap();
        assert!((v - (-2.0 * c / 4.0f64).exp()).abs() < 1e-6);
        assert!(concentration_bound(&q(5.0, 1.0, 0.0, 4)).is_err());
    }

    #[test]
    fn interval_examples() {
        assert_eq!(monotone_k_interval(1.0, 0.0).unwrap(), (2.0, 6.0));
        let (lo, hi) = monotone_k_interval(1.0, 1.0).unwrap();
        assert_eq!(lo, 1.0);
        assert!((hi - (5f64.sqrt() + 2.0)).abs() < 1e-15);
        assert!(monotone_k_interval(1.0, 2f64.sqrt()).is_err());
    }

    #[test]
    fn mom_bias_examples() {
        assert_eq!(gamma_mom_bias_bound(1.0, 1.0, 1.0).unwrap(), 1.0);
        assert_eq!(gamma_mom_bias_bound(4.0, 1.0, 2.0).unwrap(), 1.0);
        assert_eq!(gamma_mom_bias_bound(7.0, 0.0, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn lambert_examples() {
        assert_eq!(lambert_w_minus1(-1.0 / E).unwrap(), -1.0);
        let w = lambert_w_minus1(-0.5 / E).unwrap();
        assert!((w + 2.678_346_990_016_660_5).abs() < 1e-13, "{w}");
        assert!(lambert_w_minus1(0.0).is_err());
        assert!(lambert_w_minus1(-0.5).is_err());
        for &x in &[-1e-300, -1e-10, -0.01, -0.2, -0.3678, -0.36787944] {
            let w = lambert_w_minus1(x).unwrap();
            assert!(w <= -1.0);
            assert!((w * w.exp() - x).abs() <= 1e-12 * x.abs(), "x={x} w={w}");
        }
    }

    #[test]
    fn expected_hl_examples() {
        let m = expected_hl_exponential(1.0).unwrap();
        assert!((m - 0.8392).abs() < 5e-5, "{m}");
        assert_eq!(expected_hl_exponential(2.0).unwrap(), 2.0 * m);
        let cdf = integrate(|x| 4.0 * x * (-2.0 * x).exp(), 0.0, m, 1e-13).unwrap().value;
        assert!((cdf - 0.5).abs() < 1e-10);
        assert!(expected_hl_exponential(0.0).is_err());
    }
}
