//! Graded side: homogeneous quotients standing in for associated graded
//! rings. Hilbert functions here are counted degree by degree from scratch,
//! so they carry no truncation caveat; that independence is what makes the
//! graded numbers usable as a check on the local engine.

use crate::field::FieldSpec;
use crate::local::{hilbert_function, HilbertVector, LocalError, ModulePresentation, QuotientPresentation, RingTable};
use crate::matrix::{Echelon, SparseVec};
use crate::monomial::{monomials_of_degree, Monomial};
use crate::poly::Poly;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GradedError {
    #[error("generator {index} is not homogeneous")]
    NotHomogeneous { index: usize },
    #[error("generator {index} has degree 0")]
    DegreeZero { index: usize },
    #[error(transparent)]
    Local(#[from] LocalError),
}

/// Homogeneous quotient K[x_1..x_m]/(h_1..h_t), every h_i of degree >= 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedQuotient {
    pub vars: Vec<String>,
    pub field: FieldSpec,
    pub gens: Vec<Poly>,
}

impl GradedQuotient {
    pub fn new(vars: Vec<String>, field: FieldSpec, gens: Vec<Poly>) -> Result<GradedQuotient, GradedError> {
        for (index, h) in gens.iter().enumerate() {
            if !h.is_homogeneous() || h.is_zero() {
                return Err(GradedError::NotHomogeneous { index });
            }
            if h.ord() == Some(0) {
                return Err(GradedError::DegreeZero { index });
            }
        }
        Ok(GradedQuotient { vars, field, gens })
    }

    fn nvars(&self) -> usize {
        self.vars.len()
    }

    /// Echelon of the degree-d piece of the ideal, in deglex coordinates,
    /// together with the monomial list indexing those coordinates.
    fn component_span(&self, d: usize) -> (Echelon, Vec<Monomial>) {
        let monos = monomials_of_degree(self.nvars(), d);
        let index: std::collections::BTreeMap<&Monomial, usize> =
            monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut ech = Echelon::new();
        for h in &self.gens {
            let a = h.ord().expect("nonzero");
            if a > d {
                continue;
            }
            for mu in monomials_of_degree(self.nvars(), d - a) {
                let prod = h.mul_monomial(&mu);
                let mut v: SparseVec = prod
                    .terms
                    .iter()
                    .map(|(m, c)| (index[m], c.clone()))
                    .collect();
                v.sort_by_key(|(c, _)| *c);
                ech.insert(v);
            }
        }
        (ech, monos)
    }

    /// Monomials whose classes form the canonical basis of degree d.
    fn component_basis(&self, d: usize) -> Vec<Monomial> {
        let (ech, monos) = self.component_span(d);
        let pivots: std::collections::BTreeSet<usize> = ech.pivots().collect();
        monos
            .iter()
            .enumerate()
            .filter(|(i, _)| !pivots.contains(i))
            .map(|(_, m)| m.clone())
            .collect()
    }
}

/// Exact graded Hilbert function: dim of each component for n = 0..n_max.
pub fn graded_hf(g: &GradedQuotient, n_max: usize) -> HilbertVector {
    let values = (0..=n_max)
        .map(|d| {
            let (ech, monos) = g.component_span(d);
            monos.len() - ech.rank()
        })
        .collect();
    HilbertVector { values, valid_to: n_max }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GradedVerdict {
    Verified,
    Refuted { degree: usize },
}

/// Does the candidate G present the associated graded ring of A? Verified
/// means (i) every generator of G is the initial form of an exhibited ideal
/// element of A, and (ii) the graded and local Hilbert functions agree for
/// n <= n_max. Containment plus equal Hilbert functions forces equality on
/// the checked range. Refuted carries the first degree of mismatch.
pub fn verify_assoc_graded(
    a: &QuotientPresentation,
    g: &GradedQuotient,
    n_max: usize,
) -> Result<GradedVerdict, GradedError> {
    let local = hilbert_function(&ModulePresentation::cyclic(a.clone()), n_max)?;
    let graded = graded_hf(g, n_max);
    let table = RingTable::new(a);
    let mut failure: Option<usize> = None;
    for (index, h) in g.gens.iter().enumerate() {
        if !h.is_homogeneous() || h.is_zero() {
            return Err(GradedError::NotHomogeneous { index });
        }
        if !table.liftable_initial_form(h) {
            let d = h.ord().expect("nonzero");
            failure = Some(failure.map_or(d, |f| f.min(d)));
        }
    }
    for n in 0..=n_max {
        if graded.values[n] != local.values[n] {
            failure = Some(failure.map_or(n, |f| f.min(n)));
            break;
        }
    }
    Ok(match failure {
        None => GradedVerdict::Verified,
        Some(degree) => GradedVerdict::Refuted { degree },
    })
}

/// Exact certificate that depth G = 0: a nonzero homogeneous class killed by
/// every variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SocleCertificate {
    pub element: Poly,
    pub degree: usize,
    /// one entry per variable: (name, annihilation verified)
    pub checks: Vec<(String, bool)>,
}

/// Search degrees 1..=max_degree ascending, candidates in deglex order;
/// the first certificate wins, so output is deterministic. None means
/// inconclusive up to max_degree, not absence of a socle.
pub fn socle_witness(g: &GradedQuotient, max_degree: usize) -> Option<SocleCertificate> {
    let nv = g.nvars();
    for d in 1..=max_degree {
        let basis = g.component_basis(d);
        if basis.is_empty() {
            continue;
        }
        let (next_ech, next_monos) = g.component_span(d + 1);
        let next_index: std::collections::BTreeMap<&Monomial, usize> =
            next_monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
        // columns: quotient basis of degree d; rows: nv stacked copies of
        // the degree d+1 coordinates, reduced mod the ideal
        let mut solver = crate::matrix::KernelSolver::new(g.field);
        let mut kernel: Vec<SparseVec> = Vec::new();
        for b in &basis {
            let mut image: SparseVec = Vec::new();
            for i in 0..nv {
                let prod = Monomial::var(nv, i).mul(b);
                let v: SparseVec = vec![(next_index[&prod], g.field.one())];
                let red = next_ech.reduce(&v);
                for (c, val) in red {
                    image.push((i * next_monos.len() + c, val));
                }
            }
            image.sort_by_key(|(c, _)| *c);
            if let Some(k) = solver.offer(image) {
                kernel.push(k);
            }
        }
        if let Some(k) = kernel.first() {
            let mut element = Poly::zero();
            for (col, val) in k {
                element.add_term(basis[*col].clone(), val.clone());
            }
            // re-verify every annihilation identity independently
            let checks: Vec<(String, bool)> = (0..nv)
                .map(|i| {
                    let prod = element.mul_monomial(&Monomial::var(nv, i));
                    let v: SparseVec = prod
                        .terms
                        .iter()
                        .map(|(m, c)| (next_index[m], c.clone()))
                        .collect();
                    let mut v = v;
                    v.sort_by_key(|(c, _)| *c);
                    (g.vars[i].clone(), next_ech.contains(&v))
                })
                .collect();
            assert!(checks.iter().all(|(_, ok)| *ok), "socle candidate failed re-verification");
            return Some(SocleCertificate { element, degree: d, checks });
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RegSeqVerdict {
    RegularCertified,
    NotRegular { degree: usize },
    Inconclusive,
}

/// Hilbert-series test for regularity of homogeneous g_1..g_c of degrees
/// a_1..a_c: the quotient's Hilbert function is compared coefficient-wise
/// against prod(1 - t^{a_i})/(1 - t)^m. Any strict excess certifies
/// NotRegular at that degree; equality through the socle bound
/// sum(a_i - 1) + 1 certifies a regular sequence.
pub fn regular_sequence_test(
    vars: &[String],
    field: FieldSpec,
    gens: &[Poly],
    check_to: usize,
) -> Result<RegSeqVerdict, GradedError> {
    let g = GradedQuotient::new(vars.to_vec(), field, gens.to_vec())?;
    let degrees: Vec<usize> = g.gens.iter().map(|h| h.ord().unwrap()).collect();
    let hf = graded_hf(&g, check_to);
    let series = ci_series(vars.len(), &degrees, check_to);
    for d in 0..=check_to {
        let actual = hf.values[d] as i64;
        if actual > series[d] {
            return Ok(RegSeqVerdict::NotRegular { degree: d });
        }
        // the quotient is never smaller than the complete-intersection
        // bound, so a deficit would be an arithmetic bug
        assert!(
            actual == series[d],
            "Hilbert function fell below the complete-intersection series at degree {d}"
        );
    }
    let socle_bound: usize = degrees.iter().map(|a| a - 1).sum::<usize>() + 1;
    if check_to >= socle_bound {
        Ok(RegSeqVerdict::RegularCertified)
    } else {
        Ok(RegSeqVerdict::Inconclusive)
    }
}

/// Coefficients of prod(1 - t^{a_i}) / (1 - t)^m up to degree n_max.
fn ci_series(m: usize, degrees: &[usize], n_max: usize) -> Vec<i64> {
    let mut coeffs = vec![0i64; n_max + 1];
    coeffs[0] = 1;
    for &a in degrees {
        // multiply by (1 - t^a)
        for d in (0..=n_max).rev() {
            if d >= a {
                coeffs[d] -= coeffs[d - a];
            }
        }
    }
    for _ in 0..m {
        // divide by (1 - t): cumulative sums
        for d in 1..=n_max {
            coeffs[d] += coeffs[d - 1];
        }
    }
    coeffs
}
