//! Exact scalar arithmetic over the two supported coefficient fields:
//!
//! - arbitrary-precision rationals,
//! - prime fields F_p with p a u64 prime.
//!
//! Every operation is exact; there is no floating point anywhere in the
//! crate. Scalars carry their field so that mixing fields is a programming
//! error caught immediately rather than a silent wrong answer.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Coefficient field selector. The default stress field is F_32003: large
/// enough that random degenerations are improbable, small enough that
/// arithmetic stays in u64.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    Rationals,
    PrimeField(u64),
}

/// Default prime for randomized stress tests.
pub const STRESS_PRIME: u64 = 32003;

impl FieldSpec {
    /// Prime field constructor; rejects composite moduli.
    pub fn prime_field(p: u64) -> Result<FieldSpec, FieldError> {
        if is_prime_u64(p) {
            Ok(FieldSpec::PrimeField(p))
        } else {
            Err(FieldError::NotPrime(p))
        }
    }

    pub fn zero(&self) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rat(BigRational::zero()),
            FieldSpec::PrimeField(p) => Scalar::Fp { val: 0, p: *p },
        }
    }

    pub fn one(&self) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rat(BigRational::one()),
            FieldSpec::PrimeField(p) => Scalar::Fp { val: 1, p: *p },
        }
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rat(BigRational::from(BigInt::from(n))),
            FieldSpec::PrimeField(p) => {
                let r = n.rem_euclid(*p as i64) as u64;
                Scalar::Fp { val: r, p: *p }
            }
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "Q"),
            FieldSpec::PrimeField(p) => write!(f, "F{p}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("division by zero")]
    DivisionByZero,
}

/// One exact field element. Fp values are kept reduced: 0 <= val < p.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rat(BigRational),
    Fp { val: u64, p: u64 },
}

impl Scalar {
    pub fn field(&self) -> FieldSpec {
        match self {
            Scalar::Rat(_) => FieldSpec::Rationals,
            Scalar::Fp { p, .. } => FieldSpec::PrimeField(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_zero(),
            Scalar::Fp { val, .. } => *val == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_one(),
            Scalar::Fp { val, .. } => *val == 1,
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            (Scalar::Fp { val: a, p }, Scalar::Fp { val: b, p: q }) => {
                assert_eq!(p, q, "mixed prime fields");
                Scalar::Fp { val: addmod(*a, *b, *p), p: *p }
            }
            _ => panic!("mixed scalar fields"),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rat(a) => Scalar::Rat(-a),
            Scalar::Fp { val, p } => Scalar::Fp { val: if *val == 0 { 0 } else { p - val }, p: *p },
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            (Scalar::Fp { val: a, p }, Scalar::Fp { val: b, p: q }) => {
                assert_eq!(p, q, "mixed prime fields");
                Scalar::Fp { val: mulmod(*a, *b, *p), p: *p }
            }
            _ => panic!("mixed scalar fields"),
        }
    }

    /// Multiplicative inverse; errors on zero.
    pub fn inv(&self) -> Result<Scalar, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(match self {
            Scalar::Rat(a) => Scalar::Rat(a.recip()),
            Scalar::Fp { val, p } => Scalar::Fp { val: powmod(*val, p - 2, *p), p: *p },
        })
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        Ok(self.mul(&other.inv()?))
    }

    /// Rendering used by the CLI: integers without denominator, otherwise a/b.
    pub fn render(&self) -> String {
        match self {
            Scalar::Rat(r) => {
                if r.denom().is_one() {
                    r.numer().to_string()
                } else {
                    format!("{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Fp { val, .. } => val.to_string(),
        }
    }

    /// Signed rendering helper: (sign, magnitude string without leading -).
    pub fn render_signed(&self) -> (bool, String) {
        match self {
            Scalar::Rat(r) => (r.is_negative(), {
                let a = r.abs();
                if a.denom().is_one() {
                    a.numer().to_string()
                } else {
                    format!("{}/{}", a.numer(), a.denom())
                }
            }),
            Scalar::Fp { val, .. } => (false, val.to_string()),
        }
    }
}

fn addmod(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % p as u128) as u64
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc: u64 = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, p);
        }
        base = mulmod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, valid for all u64 with this witness set.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == small {
            return true;
        }
        if n % small == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_rejects_composites() {
        assert!(FieldSpec::prime_field(32003).is_ok());
        assert!(FieldSpec::prime_field(32001).is_err());
        assert!(FieldSpec::prime_field(1).is_err());
        assert!(FieldSpec::prime_field(2).is_ok());
    }

    #[test]
    fn rational_arithmetic_is_exact() {
        let f = FieldSpec::Rationals;
        let third = f.from_i64(1).div(&f.from_i64(3)).unwrap();
        let sum = third.add(&third).add(&third);
        assert!(sum.is_one());
    }

    #[test]
    fn fp_matches_integer_arithmetic_mod_p() {
        // random triples compared against wide integer arithmetic
        let p = STRESS_PRIME;
        let f = FieldSpec::PrimeField(p);
        let mut state: u64 = 0x9e3779b97f4a7c15;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            state >> 33
        };
        for _ in 0..10_000 {
            let (a, b, c) = (next() % p, next() % p, next() % p);
            let lhs = f
                .from_i64(a as i64)
                .add(&f.from_i64(b as i64))
                .mul(&f.from_i64(c as i64));
            let wide = ((a as u128 + b as u128) % p as u128) * c as u128 % p as u128;
            assert_eq!(lhs, Scalar::Fp { val: wide as u64, p });
        }
    }

    #[test]
    fn fp_inverse_is_exact() {
        let f = FieldSpec::PrimeField(7);
        for v in 1..7 {
            let s = f.from_i64(v);
            assert!(s.mul(&s.inv().unwrap()).is_one());
        }
        assert_eq!(f.zero().inv(), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn negative_representatives_normalize() {
        let f = FieldSpec::PrimeField(5);
        assert_eq!(f.from_i64(-1), f.from_i64(4));
        assert_eq!(f.from_i64(-12), f.from_i64(3));
    }
}
