//! Per-order-statistic weights as disjoint runs of constant weight.
//!
//! Segments live in order-statistic coordinates t ∈ [0, n]; element i
//! (0-based) occupies [i, i+1] and receives `density × overlap`. Point masses
//! attach to a single element. Weights at any index are summed in insertion
//! order, so two builders fed identical pieces produce bit-identical profiles.

use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq)]
pub struct WeightProfile {
    n: usize,
    runs: Vec<(usize, usize, f64)>,
    total: f64,
}

impl WeightProfile {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn total_weight(&self) -> f64 {
        self.total
    }

    /// Σ w_i x_i / Σ w_i over sorted values.
    pub fn apply(&self, xs: &[f64]) -> f64 {
        debug_assert_eq!(xs.len(), self.n);
        let mut acc = 0.0;
        for &(s, e, w) in &self.runs {
            let part: f64 = xs[s..e].iter().sum();
            acc += w * part;
        }
        acc / self.total
    }

    /// Weights rescaled to sum to n.
    pub fn weights(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        let scale = self.n as f64 / self.total;
        for &(s, e, w) in &self.runs {
            for o in &mut out[s..e] {
                *o = w * scale;
            }
        }
        out
    }

    /// Indices of the extreme elements carrying non-zero weight.
    pub fn support(&self) -> Option<(usize, usize)> {
        Some((self.runs.first()?.0, self.runs.last()?.1 - 1))
    }
}

#[derive(Debug, Clone)]
pub struct ProfileBuilder {
    n: usize,
    pieces: Vec<(usize, usize, f64)>,
}

impl ProfileBuilder {
    pub fn new(n: usize) -> Self {
        Self { n, pieces: Vec::new() }
    }

    /// Uniform density over [a, b] in order-statistic coordinates.
    pub fn segment(&mut self, a: f64, b: f64, density: f64) {
        let n = self.n as f64;
        let (a, b) = (a.clamp(0.0, n), b.clamp(0.0, n));
        if !(b > a) || density == 0.0 {
            return;
        }
        let fa = a.floor();
        let cb = b.ceil();
        if cb - fa <= 1.0 {
            // Entirely inside one element.
            self.push(fa as usize, fa as usize + 1, density * (b - a));
            return;
        }
        let ca = a.ceil();
        let fb = b.floor();
        if ca > a {
            self.push(fa as usize, fa as usize + 1, density * (ca - a));
        }
        if fb > ca {
            self.push(ca as usize, fb as usize, density);
        }
        if b > fb {
            self.push(fb as usize, fb as usize + 1, density * (b - fb));
        }
    }

    /// Point mass on element `index` (0-based).
    pub fn mass(&mut self, index: usize, mass: f64) {
        if mass != 0.0 {
            let i = index.min(self.n - 1);
            self.push(i, i + 1, mass);
        }
    }

    fn push(&mut self, s: usize, e: usize, w: f64) {
        if e > s {
            self.pieces.push((s, e, w));
        }
    }

    pub fn build(self) -> WeightProfile {
        let mut bounds: Vec<usize> = self.pieces.iter().flat_map(|p| [p.0, p.1]).collect();
        bounds.sort_unstable();
        bounds.dedup();
        let mut starts: Vec<usize> = (0..self.pieces.len()).collect();
        starts.sort_by_key(|&i| self.pieces[i].0);
        let mut ends = starts.clone();
        ends.sort_by_key(|&i| self.pieces[i].1);
        let (mut si, mut ei) = (0, 0);
        let mut active = BTreeSet::new();
        let mut runs: Vec<(usize, usize, f64)> = Vec::new();
        for w in bounds.windows(2) {
            let (x, y) = (w[0], w[1]);
            while ei < ends.len() && self.pieces[ends[ei]].1 <= x {
                active.remove(&ends[ei]);
                ei += 1;
            }
            while si < starts.len() && self.pieces[starts[si]].0 <= x {
                if self.pieces[starts[si]].1 > x {
                    active.insert(starts[si]);
                }
                si += 1;
            }
            let wt: f64 = active.iter().map(|&i| self.pieces[i].2).sum();
            if wt == 0.0 {
                continue;
            }
            match runs.last_mut() {
                Some(last) if last.1 == x && last.2 == wt => last.1 = y,
                _ => runs.push((x, y, wt)),
            }
        }
        let total = runs.iter().map(|&(s, e, w)| w * (e - s) as f64).sum();
        WeightProfile { n: self.n, runs, total }
    }
}
