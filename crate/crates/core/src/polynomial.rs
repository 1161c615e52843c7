//! Exact multivariate polynomials, used as manufactured solutions.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::{Jet3, ScalarField};
use crate::math;

/// A sparse polynomial in `d` variables: a list of (exponents, coefficient).
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    d: usize,
    terms: Vec<(Vec<u32>, f64)>,
}

impl Polynomial {
    pub fn zero(d: usize) -> Self {
        Polynomial {
            d,
            terms: Vec::new(),
        }
    }

    pub fn constant(d: usize, c: f64) -> Self {
        Polynomial {
            d,
            terms: vec![(vec![0; d], c)],
        }
        .normalized()
    }

    pub fn coordinate(d: usize, i: usize) -> Self {
        let mut e = vec![0; d];
        e[i] = 1;
        Polynomial {
            d,
            terms: vec![(e, 1.0)],
        }
    }

    /// `Σ x_i²`.
    pub fn norm_sq(d: usize) -> Self {
        let mut p = Polynomial::zero(d);
        for i in 0..d {
            p = p.add(&Polynomial::coordinate(d, i).mul(&Polynomial::coordinate(d, i)));
        }
        p
    }

    /// `a · x` for a fixed vector `a`.
    pub fn linear(a: &[f64]) -> Self {
        let d = a.len();
        let mut p = Polynomial::zero(d);
        for (i, ai) in a.iter().enumerate() {
            p = p.add(&Polynomial::coordinate(d, i).scale(*ai));
        }
        p
    }

    /// The same polynomial in `d >= dim()` variables, constant in the new ones.
    pub fn extend_dim(&self, d: usize) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut e2 = e.clone();
                e2.resize(d.max(self.d), 0);
                (e2, *c)
            })
            .collect();
        Polynomial {
            d: d.max(self.d),
            terms,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|(e, _)| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    fn normalized(mut self) -> Self {
        self.terms.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(Vec<u32>, f64)> = Vec::with_capacity(self.terms.len());
        for (e, c) in self.terms {
            match out.last_mut() {
                Some(last) if last.0 == e => last.1 += c,
                _ => out.push((e, c)),
            }
        }
        out.retain(|(_, c)| *c != 0.0);
        Polynomial {
            d: self.d,
            terms: out,
        }
    }

    pub fn add(&self, o: &Polynomial) -> Polynomial {
        let mut terms = self.terms.clone();
        terms.extend(o.terms.iter().cloned());
        Polynomial { d: self.d, terms }.normalized()
    }

    pub fn scale(&self, c: f64) -> Polynomial {
        Polynomial {
            d: self.d,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
        .normalized()
    }

    pub fn mul(&self, o: &Polynomial) -> Polynomial {
        let mut terms = Vec::with_capacity(self.terms.len() * o.terms.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                let e = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                terms.push((e, ca * cb));
            }
        }
        Polynomial { d: self.d, terms }.normalized()
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut r = Polynomial::constant(self.d, 1.0);
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    pub fn derivative(&self, i: usize) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e[i] > 0)
            .map(|(e, c)| {
                let mut e2 = e.clone();
                e2[i] -= 1;
                (e2, c * e[i] as f64)
            })
            .collect();
        Polynomial { d: self.d, terms }.normalized()
    }

    pub fn laplacian(&self) -> Polynomial {
        let mut r = Polynomial::zero(self.d);
        for i in 0..self.d {
            r = r.add(&self.derivative(i).derivative(i));
        }
        r
    }

    pub fn eval(&self, p: &[f64]) -> f64 {
        let parts: Vec<f64> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut v = *c;
                for (x, k) in p.iter().zip(e) {
                    if *k > 0 {
                        v *= math::powi(*x, *k as i32);
                    }
                }
                v
            })
            .collect();
        math::pairwise_sum(&parts)
    }
}

/// A polynomial with its derivatives through third order and its bilaplacian precomputed.
#[derive(Clone, Debug)]
pub struct PolynomialField {
    p: Polynomial,
    grad: Vec<Polynomial>,
    hess: Vec<Polynomial>,
    third: Vec<Polynomial>,
    bilap: Polynomial,
}

impl PolynomialField {
    pub fn new(p: Polynomial) -> Self {
        let d = p.dim();
        let grad: Vec<Polynomial> = (0..d).map(|i| p.derivative(i)).collect();
        let mut hess = Vec::with_capacity(d * d);
        for g in &grad {
            for j in 0..d {
                hess.push(g.derivative(j));
            }
        }
        let mut third = Vec::with_capacity(d * d * d);
        for h in &hess {
            for k in 0..d {
                third.push(h.derivative(k));
            }
        }
        let bilap = p.laplacian().laplacian();
        PolynomialField {
            p,
            grad,
            hess,
            third,
            bilap,
        }
    }

    pub fn polynomial(&self) -> &Polynomial {
        &self.p
    }
}

impl ScalarField for PolynomialField {
    fn ambient(&self) -> usize {
        self.p.dim()
    }

    fn value(&self, p: &[f64]) -> Result<f64> {
        if p.len() != self.p.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.p.dim(),
                found: p.len(),
            });
        }
        Ok(self.p.eval(p))
    }

    fn jet(&self, p: &[f64]) -> Option<Jet3> {
        Some(Jet3 {
            d: self.p.dim(),
            value: self.p.eval(p),
            grad: self.grad.iter().map(|q| q.eval(p)).collect(),
            hess: self.hess.iter().map(|q| q.eval(p)).collect(),
            third: self.third.iter().map(|q| q.eval(p)).collect(),
        })
    }

    fn bilaplacian(&self, p: &[f64]) -> Option<f64> {
        Some(self.bilap.eval(p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bilaplacian_of_quartic_norm() {
        // Δ²|X|⁴ = 8(n+1)(n+3) in ambient dimension n+1
        for n in 2..7 {
            let d = n + 1;
            let f = PolynomialField::new(Polynomial::norm_sq(d).pow(2));
            let b = f.bilaplacian(&vec![0.1; d]).unwrap();
            assert_eq!(b, 8.0 * (n as f64 + 1.0) * (n as f64 + 3.0));
        }
    }

    #[test]
    fn jet_matches_derivatives() {
        let d = 3;
        let p = Polynomial::coordinate(d, 0)
            .pow(3)
            .add(&Polynomial::coordinate(d, 1).mul(&Polynomial::coordinate(d, 2)));
        let f = PolynomialField::new(p);
        let j = f.jet(&[2.0, 3.0, 5.0]).unwrap();
        assert_eq!(j.value, 8.0 + 15.0);
        assert_eq!(j.grad, vec![12.0, 5.0, 3.0]);
        assert_eq!(j.t(0, 0, 0), 6.0);
        assert_eq!(j.h(1, 2), 1.0);
    }
}
