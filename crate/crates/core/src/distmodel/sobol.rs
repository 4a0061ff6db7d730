//! Sobol low-discrepancy sequence, 32-bit, Gray-code ordering, Joe–Kuo
//! direction numbers for up to 64 dimensions.

use super::sobol_table::{DIRECTIONS, MAX_DIM, TABLE_VERSION};
use crate::error::{param, Error, Result};

pub const SOBOL_MAX_DIM: usize = MAX_DIM;
pub const SOBOL_TABLE_VERSION: &str = TABLE_VERSION;

const BITS: usize = 32;
const SCALE: f64 = 1.0 / 4_294_967_296.0;

fn directions(d: usize) -> [u32; BITS] {
    let mut v = [0u32; BITS];
    if d == 0 {
        for (k, vk) in v.iter_mut().enumerate() {
            *vk = 1u32 << (31 - k);
        }
        return v;
    }
    let (s, a, m) = DIRECTIONS[d];
    let s = s as usize;
    for k in 0..s.min(BITS) {
        v[k] = m[k] << (31 - k);
    }
    for k in s..BITS {
        let mut x = v[k - s] ^ (v[k - s] >> s);
        for j in 1..s {
            if (a >> (s - 1 - j)) & 1 == 1 {
                x ^= v[k - j];
            }
        }
        v[k] = x;
    }
    v
}

/// Stateful generator; `next` yields successive points starting at `skip`.
#[derive(Debug, Clone)]
pub struct SobolStream {
    v: Vec<[u32; BITS]>,
    x: Vec<u32>,
    index: u64,
}

impl SobolStream {
    pub fn new(dim: usize, skip: u64) -> Result<Self> {
        if dim == 0 {
            return Err(param("sobol dimension must be at least 1"));
        }
        if dim > MAX_DIM {
            return Err(Error::UnsupportedDimension(dim));
        }
        if skip >= 1u64 << BITS {
            return Err(Error::Capacity("sobol skip beyond 2^32 points".into()));
        }
        let v: Vec<_> = (0..dim).map(directions).collect();
        let gray = skip ^ (skip >> 1);
        let x = v
            .iter()
            .map(|vd| {
                (0..BITS)
                    .filter(|&b| (gray >> b) & 1 == 1)
                    .fold(0u32, |acc, b| acc ^ vd[b])
            })
            .collect();
        Ok(Self { v, x, index: skip })
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    /// Writes the current point into `out` and advances.
    pub fn next_into(&mut self, out: &mut [f64]) -> Result<()> {
        if self.index >= 1u64 << BITS {
            return Err(Error::Capacity("sobol sequence exhausted (2^32 points)".into()));
        }
        for (o, &x) in out.iter_mut().zip(&self.x) {
            *o = x as f64 * SCALE;
        }
        let c = (self.index + 1).trailing_zeros() as usize;
        if c < BITS {
            for (x, vd) in self.x.iter_mut().zip(&self.v) {
                *x ^= vd[c];
            }
        }
        self.index += 1;
        Ok(())
    }
}

/// First `n` points after skipping `skip`, each a `dim`-vector in [0, 1).
pub fn sobol_sequence(n: usize, dim: usize, skip: u64) -> Result<Vec<Vec<f64>>> {
    if n == 0 {
        return Err(param("sobol_sequence needs n >= 1"));
    }
    let mut s = SobolStream::new(dim, skip)?;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let mut p = vec![0.0; dim];
        s.next_into(&mut p)?;
        out.push(p);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_prefix() {
        let pts = sobol_sequence(3, 1, 1).unwrap();
        assert_eq!(pts, vec![vec![0.5], vec![0.75], vec![0.25]]);
        assert_eq!(sobol_sequence(1, 1, 0).unwrap(), vec![vec![0.0]]);
    }

    #[test]
    fn matches_reference_points() {
        // Unscrambled reference points (indices 3, 7, 11, 19, 31) for several
        // dimensions, produced by an independent implementation of the same table.
        let cases: [(usize, [f64; 5]); 6] = [
            (0, [0.25, 0.125, 0.4375, 0.34375, 0.03125]),
            (1, [0.75, 0.625, 0.5625, 0.71875, 0.53125]),
            (2, [0.75, 0.375, 0.1875, 0.71875, 0.90625]),
            (9, [0.25, 0.875, 0.0625, 0.40625, 0.59375]),
            (40, [0.75, 0.125, 0.3125, 0.65625, 0.84375]),
            (63, [0.25, 0.375, 0.9375, 0.34375, 0.78125]),
        ];
        let pts = sobol_sequence(32, 64, 0).unwrap();
        for (d, want) in cases {
            for (j, &i) in [3usize, 7, 11, 19, 31].iter().enumerate() {
                assert_eq!(pts[i][d], want[j], "dim {d} index {i}");
            }
        }
        let first8 = sobol_sequence(8, 5, 0).unwrap();
        assert_eq!(first8[2], vec![0.75, 0.25, 0.25, 0.25, 0.75]);
        assert_eq!(first8[5], vec![0.875, 0.875, 0.125, 0.375, 0.875]);
    }

    #[test]
    fn skip_agrees_with_iteration() {
        let all = sobol_sequence(1000, 7, 0).unwrap();
        let tail = sobol_sequence(10, 7, 990).unwrap();
        assert_eq!(&all[990..], &tail[..]);
    }

    #[test]
    fn range_and_errors() {
        for p in sobol_sequence(4096, 64, 1).unwrap() {
            assert!(p.iter().all(|&x| (0.0..1.0).contains(&x)));
        }
        assert_eq!(SobolStream::new(65, 0).unwrap_err(), Error::UnsupportedDimension(65));
    }

    #[test]
    fn stratification() {
        // Any 2^m consecutive points from index 0 hit every dyadic cell once.
        let pts = sobol_sequence(256, 1, 0).unwrap();
        let mut cells = vec![0; 256];
        for p in pts {
            cells[(p[0] * 256.0) as usize] += 1;
        }
        assert!(cells.iter().all(|&c| c == 1));
    }
}
