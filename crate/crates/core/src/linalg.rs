//! Small dense Hermitian linear algebra: Cholesky with a jitter ladder and
//! triangular solves. Matrices are row-major `n × n` slices.

use crate::error::{Error, Result};
use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    pub dim: usize,
    /// Lower-triangular `L` with `G + jitter·I = L Lᴴ`, row-major.
    pub l: Vec<C64>,
    pub jitter_used: f64,
    pub condition_estimate: f64,
}

/// Pivots below this fraction of the mean diagonal count as breakdown.
pub const PIVOT_FLOOR: f64 = 1e-14;

/// Plain Cholesky. On failure returns the offending pivot value.
pub fn cholesky(g: &[C64], n: usize, shift: f64) -> std::result::Result<Vec<C64>, f64> {
    let mean: f64 = (0..n).map(|i| g[i * n + i].re).sum::<f64>() / n.max(1) as f64;
    let floor = PIVOT_FLOOR * mean;
    let mut l = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = g[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k].conj();
            }
            if i == j {
                let d = s.re + shift;
                if !(d > floor) || !d.is_finite() {
                    return Err(d);
                }
                l[i * n + i] = C64::new(d.sqrt(), 0.0);
            } else {
                l[i * n + j] = s / l[j * n + j].re;
            }
        }
    }
    Ok(l)
}

/// Cholesky of a Hermitian matrix, retrying with `1e-12·trace/n` on the
/// diagonal and then ten times that, at most six more times.
pub fn factor_with_jitter(g: &[C64], n: usize) -> Result<Factor> {
    let trace: f64 = (0..n).map(|i| g[i * n + i].re).sum();
    let base = 1e-12 * trace / n.max(1) as f64;
    let mut shifts = vec![0.0];
    shifts.extend((0..7).map(|k| base * 10f64.powi(k)));
    let mut worst = f64::NAN;
    for &shift in &shifts {
        match cholesky(g, n, shift) {
            Ok(l) => {
                let diag: Vec<f64> = (0..n).map(|i| l[i * n + i].re).collect();
                let hi = diag.iter().cloned().fold(0.0, f64::max);
                let lo = diag.iter().cloned().fold(f64::INFINITY, f64::min);
                return Ok(Factor {
                    dim: n,
                    l,
                    jitter_used: shift,
                    condition_estimate: if n == 0 { 1.0 } else { (hi / lo).powi(2) },
                });
            }
            Err(p) => worst = p,
        }
    }
    Err(Error::IllConditioned {
        dim: n,
        jitter: *shifts.last().unwrap(),
        min_pivot: worst,
        trace,
    })
}

impl Factor {
    /// Solves `L x = b`.
    pub fn forward(&self, b: &[C64]) -> Vec<C64> {
        let n = self.dim;
        let mut x = b.to_vec();
        for i in 0..n {
            let mut s = x[i];
            let row = &self.l[i * n..i * n + i];
            for (k, lk) in row.iter().enumerate() {
                s -= lk * x[k];
            }
            x[i] = s / self.l[i * n + i].re;
        }
        x
    }

    /// Solves `Lᴴ x = b`.
    pub fn backward(&self, b: &[C64]) -> Vec<C64> {
        let n = self.dim;
        let mut x = b.to_vec();
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in i + 1..n {
                s -= self.l[k * n + i].conj() * x[k];
            }
            x[i] = s / self.l[i * n + i].re;
        }
        x
    }

    /// Solves `(L Lᴴ) x = b`.
    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        self.backward(&self.forward(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn factor_2x2() {
        let g = vec![c(4.0, 0.0), c(2.0, 2.0), c(2.0, -2.0), c(6.0, 0.0)];
        let f = factor_with_jitter(&g, 2).unwrap();
        assert_eq!(f.jitter_used, 0.0);
        let x = f.solve(&[c(1.0, 0.0), c(0.0, 1.0)]);
        let r0 = g[0] * x[0] + g[1] * x[1];
        let r1 = g[2] * x[0] + g[3] * x[1];
        assert!((r0 - c(1.0, 0.0)).norm() < 1e-14);
        assert!((r1 - c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn singular_gets_jitter() {
        let g = vec![c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)];
        let f = factor_with_jitter(&g, 2).unwrap();
        assert!(f.jitter_used > 0.0);
        assert!(f.condition_estimate > 1e6);
    }

    #[test]
    fn indefinite_fails_with_diagnostics() {
        let g = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)];
        match factor_with_jitter(&g, 2) {
            Err(Error::IllConditioned { dim, min_pivot, .. }) => {
                assert_eq!(dim, 2);
                assert!(min_pivot < 0.0);
            }
            other => panic!("{other:?}"),
        }
    }

    proptest! {
        #[test]
        fn reconstructs_random_gram(seed in proptest::collection::vec(-1.0f64..1.0, 18)) {
            // A = B Bᴴ + I for a random 3×3 complex B
            let n = 3;
            let b: Vec<C64> = seed.chunks(2).map(|p| c(p[0], p[1])).collect();
            let mut a = vec![c(0.0, 0.0); 9];
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        a[i * n + j] += b[i * n + k] * b[j * n + k].conj();
                    }
                }
                a[i * n + i] += 1.0;
            }
            let f = factor_with_jitter(&a, n).unwrap();
            for i in 0..n {
                for j in 0..n {
                    let mut s = c(0.0, 0.0);
                    for k in 0..n {
                        s += f.l[i * n + k] * f.l[j * n + k].conj();
                    }
                    prop_assert!((s - a[i * n + j]).norm() < 1e-12);
                }
            }
        }
    }
}
