//! Finite-difference weights and step configuration.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Step size and accuracy order for finite-difference probes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StencilConfig {
    pub h: f64,
    pub order: usize,
}

impl Default for StencilConfig {
    fn default() -> Self {
        StencilConfig { h: 1e-3, order: 4 }
    }
}

impl StencilConfig {
    pub fn new(h: f64, order: usize) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::Domain("stencil step must be positive"));
        }
        if order != 2 && order != 4 {
            return Err(Error::Domain("stencil order must be 2 or 4"));
        }
        Ok(StencilConfig { h, order })
    }

    pub fn with_h(self, h: f64) -> Self {
        StencilConfig { h, ..self }
    }
}

/// Fornberg's recursion: `w[k][j]` is the weight of node `x[j]` for the `k`-th derivative at `z`.
pub fn fornberg(z: f64, x: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Symmetric integer offsets `-m..=m` and weights for the `k`-th derivative with unit spacing.
pub fn central(k: usize, order: usize) -> (Vec<i32>, Vec<f64>) {
    let m = ((k + order - 1) / 2) as i32;
    let nodes: Vec<i32> = (-m..=m).collect();
    let xs: Vec<f64> = nodes.iter().map(|v| *v as f64).collect();
    let w = fornberg(0.0, &xs, k);
    (nodes, w[k].clone())
}

/// One-sided offsets `0..len` and weights for derivatives `0..=3` with unit spacing.
pub fn one_sided(order: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let len = order + 3;
    let xs: Vec<f64> = (0..len).map(|v| v as f64).collect();
    let w = fornberg(0.0, &xs, 3);
    (xs, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_second_difference() {
        let (nodes, w) = central(2, 2);
        assert_eq!(nodes, vec![-1, 0, 1]);
        assert!((w[0] - 1.0).abs() < 1e-14 && (w[1] + 2.0).abs() < 1e-14);
        let (_, w4) = central(4, 2);
        let expect = [1.0, -4.0, 6.0, -4.0, 1.0];
        for (a, b) in w4.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn one_sided_is_exact_on_cubics() {
        let (xs, w) = one_sided(4);
        let f: Vec<f64> = xs
            .iter()
            .map(|x| 2.0 + 3.0 * x - x * x + 0.5 * x * x * x)
            .collect();
        let d: Vec<f64> = (0..4)
            .map(|k| w[k].iter().zip(&f).map(|(a, b)| a * b).sum())
            .collect();
        assert!((d[1] - 3.0).abs() < 1e-11);
        assert!((d[2] + 2.0).abs() < 1e-11);
        assert!((d[3] - 3.0).abs() < 1e-10);
    }
}
