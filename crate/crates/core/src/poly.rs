//! Exact multivariate polynomials: coefficient maps keyed by monomial.
//! These double as truncated power series once a truncation order is imposed
//! by the ring operations (see the series module).

use crate::field::{FieldSpec, Scalar};
use crate::monomial::Monomial;
use std::collections::BTreeMap;

/// Polynomial with no stored zero coefficients; zero is the empty map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    pub terms: BTreeMap<Monomial, Scalar>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { terms: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant(nvars: usize, c: Scalar) -> Poly {
        let mut p = Poly::zero();
        p.add_term(Monomial::one(nvars), c);
        p
    }

    pub fn monomial(m: Monomial, c: Scalar) -> Poly {
        let mut p = Poly::zero();
        p.add_term(m, c);
        p
    }

    /// Accumulate a term, dropping the monomial if the coefficient cancels.
    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&m) {
            Some(old) => {
                let s = old.add(&c);
                if !s.is_zero() {
                    self.terms.insert(m, s);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect() }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, v)| (m.clone(), v.mul(c))).collect() }
    }

    /// Exact product.
    pub fn mul(&self, other: &Poly) -> Poly {
        self.mul_trunc(other, usize::MAX)
    }

    /// Product discarding monomials of degree >= cap.
    pub fn mul_trunc(&self, other: &Poly, cap: usize) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            let d1 = m1.degree();
            for (m2, c2) in &other.terms {
                if cap != usize::MAX && d1 + m2.degree() >= cap {
                    continue;
                }
                out.add_term(m1.mul(m2), c1.mul(c2));
            }
        }
        out
    }

    /// Drop all terms of degree >= cap.
    pub fn truncate(&self, cap: usize) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() < cap)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Least degree with a nonzero coefficient; None for the zero polynomial
    /// (order infinite within the truncation).
    pub fn ord(&self) -> Option<usize> {
        self.terms.keys().map(|m| m.degree()).min()
    }

    /// Largest degree with a nonzero coefficient.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    /// The homogeneous component of degree ord(self): the initial form.
    pub fn initial_form(&self) -> Option<Poly> {
        let d = self.ord()?;
        Some(Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        })
    }

    pub fn is_homogeneous(&self) -> bool {
        self.ord() == self.degree()
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Poly {
        Poly { terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect() }
    }

    /// Substitute x_i -> t^{w_i}: exponent map for the one-variable image.
    /// Returns the coefficient map of the image polynomial in t.
    pub fn substitute_exponents(&self, weights: &[u64]) -> BTreeMap<u64, Scalar> {
        let mut out: BTreeMap<u64, Scalar> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e: u64 = m.0.iter().zip(weights).map(|(&a, &w)| a as u64 * w).sum();
            let entry = out.remove(&e).map_or_else(|| c.clone(), |old| old.add(c));
            if entry.is_zero() {
                out.remove(&e);
            } else {
                out.insert(e, entry);
            }
        }
        out
    }

    /// Deterministic rendering in deglex term order, e.g. "-X*Z + Y^3".
    pub fn render(&self, vars: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let (negative, mag) = c.render_signed();
            if i == 0 {
                if negative {
                    s.push('-');
                }
            } else {
                s.push_str(if negative { " - " } else { " + " });
            }
            let mono = m.render(vars);
            if mono == "1" {
                s.push_str(&mag);
            } else if mag == "1" {
                s.push_str(&mono);
            } else {
                s.push_str(&format!("{mag}*{mono}"));
            }
        }
        s
    }
}

/// Convenience constructor for tests: terms as (exponents, integer coeff).
pub fn poly_from(field: FieldSpec, terms: &[(&[u32], i64)]) -> Poly {
    let mut p = Poly::zero();
    for (exps, c) in terms {
        p.add_term(Monomial(exps.to_vec()), field.from_i64(*c));
    }
    p
}
