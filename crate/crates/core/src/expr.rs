//! Exact differentiation of kernels built from `t`, `s = |x|²` and `q = s + t²`.
//!
//! Every half-space kernel and the fundamental solution are finite sums of
//! monomials `c·t^α q^γ s^β` plus possibly `c·ln q`. The family is closed under
//! `∂_t` and under the boundary Laplacian `Δ̄` in `n` variables, so operator
//! kernels such as `𝓑₃P₁` are obtained exactly.

use alloc::vec::Vec;

use crate::math;

/// `c·t^α q^γ s^β`, with `c` relative to the owning expression's factor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term {
    pub c: f64,
    pub alpha: u32,
    pub gamma: f64,
    pub beta: u32,
}

/// `factor · (Σ terms + log·ln q)`.
///
/// The irrational normalization lives in `factor`, so term coefficients stay small dyadic
/// rationals and cancel exactly when operators are applied. Terms are kept in the canonical
/// form `β = 0` (by `s = q - t²`), which lets every cancellation happen in the coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    /// Boundary dimension, which enters `Δ̄`.
    pub n: usize,
    pub factor: f64,
    pub terms: Vec<Term>,
    /// Coefficient of `ln q`, relative to `factor`.
    pub log: f64,
}

fn binomial(b: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (b - i) as f64 / (i + 1) as f64)
}

impl Expr {
    pub fn zero(n: usize) -> Self {
        Expr {
            n,
            factor: 1.0,
            terms: Vec::new(),
            log: 0.0,
        }
    }

    pub fn monomial(n: usize, c: f64, alpha: u32, gamma: f64, beta: u32) -> Self {
        if c == 0.0 {
            return Expr::zero(n);
        }
        Expr {
            n,
            factor: c,
            terms: alloc::vec![Term {
                c: 1.0,
                alpha,
                gamma,
                beta
            }],
            log: 0.0,
        }
        .simplified()
    }

    pub fn log_q(n: usize, c: f64) -> Self {
        if c == 0.0 {
            return Expr::zero(n);
        }
        Expr {
            n,
            factor: c,
            terms: Vec::new(),
            log: 1.0,
        }
    }

    fn simplified(mut self) -> Self {
        let mut expanded: Vec<Term> = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            for k in 0..=t.beta {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                expanded.push(Term {
                    c: t.c * sign * binomial(t.beta, k),
                    alpha: t.alpha + 2 * k,
                    gamma: t.gamma + (t.beta - k) as f64,
                    beta: 0,
                });
            }
        }
        expanded.retain(|t| t.c != 0.0);
        expanded.sort_by(|a, b| {
            a.alpha
                .cmp(&b.alpha)
                .then(a.gamma.partial_cmp(&b.gamma).unwrap())
        });
        let mut out: Vec<Term> = Vec::with_capacity(expanded.len());
        for t in expanded {
            match out.last_mut() {
                Some(l) if l.alpha == t.alpha && l.gamma == t.gamma => l.c += t.c,
                _ => out.push(t),
            }
        }
        out.retain(|t| t.c != 0.0);
        self.terms = out;
        self
    }

    pub fn add(&self, o: &Expr) -> Expr {
        if o.terms.is_empty() && o.log == 0.0 {
            return self.clone();
        }
        if self.terms.is_empty() && self.log == 0.0 {
            return o.clone();
        }
        // Different normalizations only meet when unrelated kernels are summed.
        let r = if o.factor == self.factor {
            1.0
        } else {
            o.factor / self.factor
        };
        let mut terms = self.terms.clone();
        terms.extend(o.terms.iter().map(|t| Term { c: t.c * r, ..*t }));
        Expr {
            n: self.n,
            factor: self.factor,
            terms,
            log: self.log + o.log * r,
        }
        .simplified()
    }

    pub fn scale(&self, c: f64) -> Expr {
        if c == 0.0 {
            return Expr::zero(self.n);
        }
        Expr {
            factor: self.factor * c,
            ..self.clone()
        }
    }

    /// `∂_t`.
    pub fn dt(&self) -> Expr {
        let mut terms = Vec::with_capacity(2 * self.terms.len() + 1);
        for t in &self.terms {
            if t.alpha > 0 {
                terms.push(Term {
                    c: t.c * t.alpha as f64,
                    alpha: t.alpha - 1,
                    ..*t
                });
            }
            terms.push(Term {
                c: 2.0 * t.gamma * t.c,
                alpha: t.alpha + 1,
                gamma: t.gamma - 1.0,
                beta: t.beta,
            });
        }
        if self.log != 0.0 {
            terms.push(Term {
                c: 2.0 * self.log,
                alpha: 1,
                gamma: -1.0,
                beta: 0,
            });
        }
        Expr {
            n: self.n,
            factor: self.factor,
            terms,
            log: 0.0,
        }
        .simplified()
    }

    /// `Δ̄`, the Laplacian in the `n` boundary variables, using `Δ̄g(s) = 2n g' + 4s g''`.
    pub fn lap_x(&self) -> Expr {
        let n = self.n as f64;
        let mut terms = Vec::with_capacity(5 * self.terms.len() + 2);
        for t in &self.terms {
            let (c, a, g, b) = (t.c, t.alpha, t.gamma, t.beta as f64);
            let mut push = |coef: f64, gamma: f64, beta: i64| {
                if coef != 0.0 && beta >= 0 {
                    terms.push(Term {
                        c: c * coef,
                        alpha: a,
                        gamma,
                        beta: beta as u32,
                    });
                }
            };
            let bi = t.beta as i64;
            push(2.0 * n * g, g - 1.0, bi);
            push(2.0 * n * b, g, bi - 1);
            push(4.0 * g * (g - 1.0), g - 2.0, bi + 1);
            push(8.0 * g * b, g - 1.0, bi);
            push(4.0 * b * (b - 1.0), g, bi - 1);
        }
        if self.log != 0.0 {
            terms.push(Term {
                c: 2.0 * n * self.log,
                alpha: 0,
                gamma: -1.0,
                beta: 0,
            });
            terms.push(Term {
                c: -4.0 * self.log,
                alpha: 0,
                gamma: -2.0,
                beta: 1,
            });
        }
        Expr {
            n: self.n,
            factor: self.factor,
            terms,
            log: 0.0,
        }
        .simplified()
    }

    /// The full Laplacian `∂_t² + Δ̄`.
    pub fn lap(&self) -> Expr {
        self.dt().dt().add(&self.lap_x())
    }

    /// Half-space boundary operator `𝓑_k` acting in the variables `(x, t)`.
    pub fn boundary_op(&self, k: usize) -> Expr {
        match k {
            0 => self.clone(),
            1 => self.dt().scale(-1.0),
            2 => self.dt().dt().add(&self.lap_x().scale(-1.0)),
            _ => {
                let d1 = self.dt();
                d1.dt().dt().add(&d1.lap_x().scale(3.0))
            }
        }
    }

    /// Evaluate at height `t` and `s = |x|²`.
    pub fn eval(&self, t: f64, s: f64) -> f64 {
        let q = s + t * t;
        let mut parts: Vec<f64> = self
            .terms
            .iter()
            .map(|m| {
                let mut v = m.c * math::pow(q, m.gamma);
                if m.alpha > 0 {
                    v *= math::powi(t, m.alpha as i32);
                }
                if m.beta > 0 {
                    v *= math::powi(s, m.beta as i32);
                }
                v
            })
            .collect();
        if self.log != 0.0 {
            parts.push(self.log * math::ln(q));
        }
        self.factor * math::pairwise_sum(&parts)
    }

    /// Sum of the absolute values of the terms, the natural scale for rounding errors.
    pub fn magnitude(&self, t: f64, s: f64) -> f64 {
        let q = s + t * t;
        let mut m: f64 = self
            .terms
            .iter()
            .map(|m| {
                math::abs(
                    m.c * math::pow(q, m.gamma)
                        * math::powi(t, m.alpha as i32)
                        * math::powi(s, m.beta as i32),
                )
            })
            .sum();
        if self.log != 0.0 {
            m += math::abs(self.log * math::ln(q));
        }
        math::abs(self.factor) * m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laplacian_of_q_power() {
        // Δ q^{(1-n)/2} = 0 in n+1 dimensions (harmonic fundamental solution)
        for n in 2..8 {
            let e = Expr::monomial(n, 1.0, 0, (1.0 - n as f64) / 2.0, 0).lap();
            assert!(e.eval(0.7, 0.9).abs() < 1e-13, "{n}");
        }
    }

    #[test]
    fn log_is_biharmonic_in_dimension_four() {
        let e = Expr::log_q(3, 1.0).lap().lap();
        assert!(e.eval(0.4, 1.3).abs() < 1e-12);
    }

    #[test]
    fn dt_of_t_cubed() {
        let e = Expr::monomial(4, 1.0, 3, 0.0, 0);
        assert_eq!(e.boundary_op(3).eval(0.0, 2.0), 6.0);
    }
}
