//! Ring context for truncated power series: Q = k[[x_1..x_m]] represented
//! exactly modulo n^D. All arithmetic that can leave the window truncates;
//! the truncation order travels with the ring, never with the element.

use crate::expr::{parse_poly, ParseError};
use crate::field::FieldSpec;
use crate::poly::Poly;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingSpec {
    pub vars: Vec<String>,
    pub trunc: usize,
    pub field: FieldSpec,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RingError {
    #[error("truncation order must be at least 2, got {0}")]
    TruncationTooSmall(usize),
    #[error("variable names must be distinct")]
    DuplicateVariable,
    #[error("not a unit: order is positive")]
    NotAUnit,
}

impl RingSpec {
    pub fn new(vars: Vec<String>, trunc: usize, field: FieldSpec) -> Result<RingSpec, RingError> {
        if trunc < 2 {
            return Err(RingError::TruncationTooSmall(trunc));
        }
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(RingError::DuplicateVariable);
            }
        }
        Ok(RingSpec { vars, trunc, field })
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    /// Same ring carried to a different truncation order.
    pub fn with_trunc(&self, trunc: usize) -> RingSpec {
        RingSpec { vars: self.vars.clone(), trunc, field: self.field }
    }

    pub fn parse(&self, src: &str) -> Result<Poly, ParseError> {
        Ok(parse_poly(src, &self.vars, self.field)?.truncate(self.trunc))
    }

    pub fn add(&self, a: &Poly, b: &Poly) -> Poly {
        a.add(b).truncate(self.trunc)
    }

    pub fn sub(&self, a: &Poly, b: &Poly) -> Poly {
        a.sub(b).truncate(self.trunc)
    }

    pub fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        a.mul_trunc(b, self.trunc)
    }

    /// Inverse of a unit (ord 0), exact modulo n^D: geometric-series
    /// iteration, which stabilizes because the tail gains one order per step.
    pub fn invert_unit(&self, a: &Poly) -> Result<Poly, RingError> {
        if a.ord() != Some(0) {
            return Err(RingError::NotAUnit);
        }
        let nv = self.nvars();
        let c = a.terms.get(&crate::monomial::Monomial::one(nv)).expect("ord 0");
        let cinv = c.inv().expect("field constant");
        // a = c(1 - g), inverse = c^{-1} (1 + g + g^2 + ...)
        let g = Poly::constant(nv, self.field.one()).sub(&a.scale(&cinv));
        let one = Poly::constant(nv, self.field.one());
        let mut acc = one.clone();
        for _ in 1..self.trunc {
            acc = self.add(&one, &self.mul(&g, &acc));
        }
        Ok(acc.scale(&cinv))
    }
}
