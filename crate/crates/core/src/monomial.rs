//! Monomials in a fixed number of variables with the degree-lexicographic
//! order used everywhere for canonical bases: lower total degree first, and
//! within a degree the earlier declared variable dominates (X^2 < X*Y < Y^2).

use std::cmp::Ordering;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Monomial {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Monomial {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.0.len(), other.0.len());
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Rendering with declared variable names: X^2*Y, or 1 for the unit.
    pub fn render(&self, vars: &[String]) -> String {
        let mut parts = Vec::new();
        for (i, &e) in self.0.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(vars[i].clone()),
                _ => parts.push(format!("{}^{}", vars[i], e)),
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        debug_assert_eq!(self.0.len(), other.0.len(), "mixed variable counts");
        self.degree()
            .cmp(&other.degree())
            // reversed exponent comparison: X-heavy monomials come first
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(","))
    }
}

/// All monomials of exact degree d, in deglex order.
pub fn monomials_of_degree(nvars: usize, d: usize) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; nvars];
    fill(&mut out, &mut cur, 0, d);
    out
}

fn fill(out: &mut Vec<Monomial>, cur: &mut Vec<u32>, i: usize, left: usize) {
    if i + 1 == cur.len() {
        cur[i] = left as u32;
        out.push(Monomial(cur.clone()));
        return;
    }
    // descending first exponent = deglex ascending under the reversed tiebreak
    for e in (0..=left).rev() {
        cur[i] = e as u32;
        fill(out, cur, i + 1, left - e);
    }
    cur[i] = 0;
}

/// All monomials of degree < bound, in deglex order.
pub fn monomials_below(nvars: usize, bound: usize) -> Vec<Monomial> {
    let mut out = Vec::new();
    for d in 0..bound {
        out.extend(monomials_of_degree(nvars, d));
    }
    out
}
