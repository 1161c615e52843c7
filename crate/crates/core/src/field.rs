//! Evaluable fields and exact derivative jets.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Result;

/// A real field on a model domain in ambient dimension `ambient()`.
///
/// Fields may expose exact derivatives through [`ScalarField::jet`]; operators
/// fall back to finite differences when they do not.
pub trait ScalarField {
    fn ambient(&self) -> usize;

    fn value(&self, p: &[f64]) -> Result<f64>;

    /// Exact derivatives through third order at `p`.
    fn jet(&self, _p: &[f64]) -> Option<Jet3> {
        None
    }

    /// Exact `Δ²` at `p`.
    fn bilaplacian(&self, _p: &[f64]) -> Option<f64> {
        None
    }
}

impl<F: ScalarField + ?Sized> ScalarField for &F {
    fn ambient(&self) -> usize {
        (**self).ambient()
    }
    fn value(&self, p: &[f64]) -> Result<f64> {
        (**self).value(p)
    }
    fn jet(&self, p: &[f64]) -> Option<Jet3> {
        (**self).jet(p)
    }
    fn bilaplacian(&self, p: &[f64]) -> Option<f64> {
        (**self).bilaplacian(p)
    }
}

/// A field given by a closure, without exact derivatives.
pub struct FnField<F> {
    ambient: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> f64> FnField<F> {
    pub fn new(ambient: usize, f: F) -> Self {
        FnField { ambient, f }
    }
}

impl<F: Fn(&[f64]) -> f64> ScalarField for FnField<F> {
    fn ambient(&self) -> usize {
        self.ambient
    }
    fn value(&self, p: &[f64]) -> Result<f64> {
        Ok((self.f)(p))
    }
}

/// A field given by a closure returning its exact third-order jet.
pub struct JetField<F> {
    ambient: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> Jet3> JetField<F> {
    pub fn new(ambient: usize, f: F) -> Self {
        JetField { ambient, f }
    }
}

impl<F: Fn(&[f64]) -> Jet3> ScalarField for JetField<F> {
    fn ambient(&self) -> usize {
        self.ambient
    }
    fn value(&self, p: &[f64]) -> Result<f64> {
        Ok((self.f)(p).value)
    }
    fn jet(&self, p: &[f64]) -> Option<Jet3> {
        Some((self.f)(p))
    }
}

/// Value, gradient, Hessian and third-derivative tensor of a function of `d` variables.
///
/// Tensors are stored densely in row-major order, which keeps the Leibniz and
/// chain rules as plain index loops.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet3 {
    pub d: usize,
    pub value: f64,
    pub grad: Vec<f64>,
    pub hess: Vec<f64>,
    pub third: Vec<f64>,
}

impl Jet3 {
    pub fn constant(d: usize, c: f64) -> Self {
        Jet3 {
            d,
            value: c,
            grad: vec![0.0; d],
            hess: vec![0.0; d * d],
            third: vec![0.0; d * d * d],
        }
    }

    /// The coordinate function `p ↦ p_i` at the point `p`.
    pub fn coordinate(p: &[f64], i: usize) -> Self {
        let mut j = Jet3::constant(p.len(), p[i]);
        j.grad[i] = 1.0;
        j
    }

    /// `|p - c|²` with its exact derivatives.
    pub fn dist_sq(p: &[f64], c: &[f64]) -> Self {
        let d = p.len();
        let mut j = Jet3::constant(d, 0.0);
        for i in 0..d {
            let w = p[i] - c[i];
            j.value += w * w;
            j.grad[i] = 2.0 * w;
            j.hess[i * d + i] = 2.0;
        }
        j
    }

    #[inline]
    pub fn h(&self, i: usize, j: usize) -> f64 {
        self.hess[i * self.d + j]
    }

    #[inline]
    pub fn t(&self, i: usize, j: usize, k: usize) -> f64 {
        self.third[(i * self.d + j) * self.d + k]
    }

    pub fn laplacian(&self) -> f64 {
        (0..self.d).map(|i| self.h(i, i)).sum()
    }

    /// `∂_k Δ`.
    pub fn laplacian_grad(&self, k: usize) -> f64 {
        (0..self.d).map(|i| self.t(i, i, k)).sum()
    }

    pub fn add(&self, o: &Jet3) -> Jet3 {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &Jet3) -> Jet3 {
        self.zip(o, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> Jet3 {
        Jet3 {
            d: self.d,
            value: c * self.value,
            grad: self.grad.iter().map(|v| c * v).collect(),
            hess: self.hess.iter().map(|v| c * v).collect(),
            third: self.third.iter().map(|v| c * v).collect(),
        }
    }

    pub fn add_const(&self, c: f64) -> Jet3 {
        let mut j = self.clone();
        j.value += c;
        j
    }

    fn zip(&self, o: &Jet3, f: impl Fn(f64, f64) -> f64) -> Jet3 {
        Jet3 {
            d: self.d,
            value: f(self.value, o.value),
            grad: self
                .grad
                .iter()
                .zip(&o.grad)
                .map(|(a, b)| f(*a, *b))
                .collect(),
            hess: self
                .hess
                .iter()
                .zip(&o.hess)
                .map(|(a, b)| f(*a, *b))
                .collect(),
            third: self
                .third
                .iter()
                .zip(&o.third)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }

    /// Leibniz rule through third order.
    pub fn mul(&self, o: &Jet3) -> Jet3 {
        let d = self.d;
        let (a, b) = (self, o);
        let mut r = Jet3::constant(d, a.value * b.value);
        for i in 0..d {
            r.grad[i] = a.grad[i] * b.value + a.value * b.grad[i];
        }
        for i in 0..d {
            for j in 0..d {
                r.hess[i * d + j] = a.h(i, j) * b.value
                    + a.grad[i] * b.grad[j]
                    + a.grad[j] * b.grad[i]
                    + a.value * b.h(i, j);
            }
        }
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    r.third[(i * d + j) * d + k] = a.t(i, j, k) * b.value
                        + a.h(i, j) * b.grad[k]
                        + a.h(i, k) * b.grad[j]
                        + a.h(j, k) * b.grad[i]
                        + a.grad[i] * b.h(j, k)
                        + a.grad[j] * b.h(i, k)
                        + a.grad[k] * b.h(i, j)
                        + a.value * b.t(i, j, k);
                }
            }
        }
        r
    }

    /// Chain rule for `g ∘ self`, given `g` and its first three derivatives at `self.value`.
    pub fn compose(&self, g: [f64; 4]) -> Jet3 {
        let d = self.d;
        let v = self;
        let mut r = Jet3::constant(d, g[0]);
        for i in 0..d {
            r.grad[i] = g[1] * v.grad[i];
        }
        for i in 0..d {
            for j in 0..d {
                r.hess[i * d + j] = g[2] * v.grad[i] * v.grad[j] + g[1] * v.h(i, j);
            }
        }
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    r.third[(i * d + j) * d + k] = g[3] * v.grad[i] * v.grad[j] * v.grad[k]
                        + g[2]
                            * (v.h(i, j) * v.grad[k]
                                + v.h(i, k) * v.grad[j]
                                + v.h(j, k) * v.grad[i])
                        + g[1] * v.t(i, j, k);
                }
            }
        }
        r
    }

    /// `self^a` for a positive base.
    pub fn powf(&self, a: f64) -> Jet3 {
        let x = self.value;
        let p0 = crate::math::pow(x, a);
        let g = [
            p0,
            a * p0 / x,
            a * (a - 1.0) * p0 / (x * x),
            a * (a - 1.0) * (a - 2.0) * p0 / (x * x * x),
        ];
        self.compose(g)
    }

    pub fn ln(&self) -> Jet3 {
        let x = self.value;
        self.compose([
            crate::math::ln(x),
            1.0 / x,
            -1.0 / (x * x),
            2.0 / (x * x * x),
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_power_agree() {
        let p = [0.3, -0.7, 1.1];
        let q = Jet3::dist_sq(&p, &[0.1, 0.2, -0.4]);
        let a = q.mul(&q).mul(&q);
        let b = q.powf(3.0);
        assert!((a.value - b.value).abs() < 1e-12);
        for (x, y) in a.third.iter().zip(&b.third) {
            assert!((x - y).abs() < 1e-10 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn laplacian_of_square_norm() {
        let p = [0.3, -0.7, 1.1, 0.2];
        let q = Jet3::dist_sq(&p, &[0.0; 4]);
        assert_eq!(q.laplacian(), 8.0);
        let q2 = q.mul(&q);
        // Δ|X|⁴ = 4(4 + d - 2)|X|² with d = 4
        assert!((q2.laplacian() - 24.0 * q.value).abs() < 1e-12);
    }
}
