//! Bound tabulation for the `bounds` subcommand.

use robloc::bounds::{concentration_bound, monotone_k_interval, sup_qa_general, sup_qa_unimodal, BoundQuery};

use crate::error::{config, Result};
use crate::output::num;

pub const QA_COLUMNS: [&str; 4] = ["epsilon", "gamma", "sup_qa_general", "sup_qa_unimodal"];

/// ε = i/points · 1/(1+γ), i = 1..=points. The unimodal column is empty
/// where that bound is undefined (γ ≥ 5).
pub fn qa_bound_rows(gamma: f64, points: usize) -> Result<Vec<Vec<String>>> {
    if points == 0 {
        return Err(config("points must be >= 1"));
    }
    let top = 1.0 / (1.0 + gamma);
    (1..=points)
        .map(|i| {
            let e = if i == points { top } else { top * i as f64 / points as f64 };
            let g = sup_qa_general(e, gamma)?.value();
            let u = sup_qa_unimodal(e, gamma).ok().map(|b| b.value());
            Ok(vec![num(Some(e)), num(Some(gamma)), num(Some(g)), num(u)])
        })
        .collect()
}

pub const CONCENTRATION_COLUMNS: [&str; 6] = ["k", "gamma", "t", "n", "bound", "in_monotone_interval"];

/// B(k) for k = 1..=k_max; the monotone interval goes in a comment line.
pub fn concentration_rows(gamma: f64, t: f64, n: usize, k_max: usize) -> Result<(Option<(f64, f64)>, Vec<Vec<String>>)> {
    if k_max == 0 || k_max > n {
        return Err(config("k_max must lie in [1, n]"));
    }
    let interval = monotone_k_interval(gamma, t).ok();
    let rows = (1..=k_max)
        .map(|k| {
            let q = BoundQuery { epsilon: 0.0, gamma, k: k as f64, t, n, sigma: 1.0 };
            let b = concentration_bound(&q)?;
            let inside = interval.is_some_and(|(a, z)| (k as f64) >= a && (k as f64) <= z);
            Ok(vec![k.to_string(), num(Some(gamma)), num(Some(t)), n.to_string(), num(Some(b)), inside.to_string()])
        })
        .collect::<Result<_>>()?;
    Ok((interval, rows))
}
