//! Local side of the workbench: quotient presentations A = Q/(f_1..f_c),
//! finitely presented A-modules M = coker Phi, and Hilbert functions
//! H(M,n) = dim_k m^n M / m^{n+1} M computed exactly inside F/n^D F.
//!
//! The layer computation spans (m^n F + N)/n^D F by monomial multiples and
//! row-reduces once per layer, inserting monomial basis vectors in descending
//! degree batches so each rank is read off incrementally.

use crate::matrix::{Echelon, SparseVec};
use crate::monomial::{monomials_below, Monomial};
use crate::poly::Poly;
use crate::series::RingSpec;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LocalError {
    #[error("precision exceeded: need n + 1 <= D, got n = {n}, D = {d}")]
    PrecisionExceeded { n: usize, d: usize },
    #[error("relation {index} has order {ord:?}; relations must lie in n^2")]
    RelationOrder { index: usize, ord: Option<usize> },
    #[error("more relations ({c}) than variables ({m})")]
    TooManyRelations { c: usize, m: usize },
    #[error("presentation matrix is ragged or has wrong row count")]
    Shape,
}

/// A = Q/(f_1..f_c) with the declared regular sequence f, f_i in n^2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientPresentation {
    pub ring: RingSpec,
    pub relations: Vec<Poly>,
    pub declared_dim: usize,
    pub codim: usize,
    pub embdim: usize,
}

impl QuotientPresentation {
    pub fn new(ring: RingSpec, relations: Vec<Poly>) -> Result<QuotientPresentation, LocalError> {
        let m = ring.nvars();
        let c = relations.len();
        if c > m {
            return Err(LocalError::TooManyRelations { c, m });
        }
        let relations: Vec<Poly> = relations.iter().map(|f| f.truncate(ring.trunc)).collect();
        for (index, f) in relations.iter().enumerate() {
            if f.ord().map_or(true, |o| o < 2) {
                return Err(LocalError::RelationOrder { index, ord: f.ord() });
            }
        }
        // relations in n^2 leave the tangent space untouched: embdim = m,
        // hence codim = embdim - dim = c; H(A,1) = m is asserted in tests
        Ok(QuotientPresentation {
            ring,
            relations,
            declared_dim: m - c,
            codim: c,
            embdim: m,
        })
    }

    /// The regular ring Q itself (no relations).
    pub fn regular(ring: RingSpec) -> QuotientPresentation {
        let m = ring.nvars();
        QuotientPresentation {
            ring,
            relations: Vec::new(),
            declared_dim: m,
            codim: 0,
            embdim: m,
        }
    }

    /// Same presentation at a different truncation order. Sound because
    /// (f) + n^{n+1} depends only on f modulo n^{n+1}.
    pub fn with_trunc(&self, trunc: usize) -> QuotientPresentation {
        QuotientPresentation {
            ring: self.ring.with_trunc(trunc),
            relations: self.relations.iter().map(|f| f.truncate(trunc)).collect(),
            ..self.clone()
        }
    }
}

/// M = coker(Phi: A^s -> A^r), entries truncated to degree < D.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModulePresentation {
    pub over: QuotientPresentation,
    pub rank: usize,
    /// row-major, rank rows by cols columns
    pub phi: Vec<Vec<Poly>>,
}

impl ModulePresentation {
    pub fn new(
        over: QuotientPresentation,
        rank: usize,
        phi: Vec<Vec<Poly>>,
    ) -> Result<ModulePresentation, LocalError> {
        if phi.len() != rank {
            return Err(LocalError::Shape);
        }
        let cols = phi.first().map_or(0, |row| row.len());
        if phi.iter().any(|row| row.len() != cols) {
            return Err(LocalError::Shape);
        }
        let trunc = over.ring.trunc;
        let phi = phi
            .into_iter()
            .map(|row| row.into_iter().map(|e| e.truncate(trunc)).collect())
            .collect();
        Ok(ModulePresentation { over, rank, phi })
    }

    /// A as a module over itself.
    pub fn cyclic(over: QuotientPresentation) -> ModulePresentation {
        ModulePresentation { over, rank: 1, phi: vec![Vec::new()] }
    }

    /// The residue field k = A/m, presented by the row of variables.
    pub fn residue_field(over: QuotientPresentation) -> ModulePresentation {
        let nv = over.ring.nvars();
        let field = over.ring.field;
        let row = (0..nv)
            .map(|i| Poly::monomial(Monomial::var(nv, i), field.one()))
            .collect();
        ModulePresentation { over, rank: 1, phi: vec![row] }
    }

    pub fn cols(&self) -> usize {
        self.phi.first().map_or(0, |row| row.len())
    }

    pub fn with_trunc(&self, trunc: usize) -> ModulePresentation {
        ModulePresentation {
            over: self.over.with_trunc(trunc),
            rank: self.rank,
            phi: self
                .phi
                .iter()
                .map(|row| row.iter().map(|e| e.truncate(trunc)).collect())
                .collect(),
        }
    }
}

/// H(M,0..n_max) plus the largest index certified exact at this truncation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertVector {
    pub values: Vec<usize>,
    pub valid_to: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotonicityReport {
    pub nondecreasing: bool,
    pub first_violation: Option<usize>,
}

/// Non-decrease is judged only on the certified window.
pub fn monotonicity_report(h: &HilbertVector) -> MonotonicityReport {
    for n in 0..h.valid_to.min(h.values.len().saturating_sub(1)) {
        if h.values[n] > h.values[n + 1] {
            return MonotonicityReport { nondecreasing: false, first_violation: Some(n) };
        }
    }
    MonotonicityReport { nondecreasing: true, first_violation: None }
}

/// Monomial basis of V = Q/n^D and the echelon of the ideal span
/// ((f) + n^D) cap V. Columns are ordered degree-major (deglex), so echelon
/// rows with pivot degree >= d span exactly the ideal elements of order >= d.
#[derive(Debug, Clone)]
pub struct RingTable {
    pub quotient: QuotientPresentation,
    pub monos: Vec<Monomial>,
    index: BTreeMap<Monomial, usize>,
    degree_start: Vec<usize>,
    ideal: Echelon,
}

impl RingTable {
    pub fn new(a: &QuotientPresentation) -> RingTable {
        let d = a.ring.trunc;
        let nv = a.ring.nvars();
        let monos = monomials_below(nv, d);
        let index: BTreeMap<Monomial, usize> =
            monos.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let mut degree_start = vec![0; d + 1];
        for deg in 0..=d {
            degree_start[deg] = monos.iter().take_while(|m| m.degree() < deg).count();
        }
        let mut table = RingTable { quotient: a.clone(), monos, index, degree_start, ideal: Echelon::new() };
        for f in &a.relations {
            for mu in table.monos.clone() {
                let w = f.mul_monomial(&mu).truncate(d);
                let v = table.to_sparse(&w, 0, 1);
                table.ideal.insert(v);
            }
        }
        table
    }

    pub fn nmonos(&self) -> usize {
        self.monos.len()
    }

    /// First flat column of the given degree block (rank-1 coordinates).
    pub fn degree_start(&self, deg: usize) -> usize {
        self.degree_start[deg.min(self.degree_start.len() - 1)]
    }

    pub fn mono_index(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Flatten a polynomial into component `comp` of a rank-`rank` vector.
    /// Flat column = monomial index * rank + component: degree-major order.
    pub fn to_sparse(&self, p: &Poly, comp: usize, rank: usize) -> SparseVec {
        let mut v: SparseVec = Vec::with_capacity(p.terms.len());
        for (m, c) in &p.terms {
            if let Some(i) = self.index.get(m) {
                v.push((i * rank + comp, c.clone()));
            }
        }
        v.sort_by_key(|(c, _)| *c);
        v
    }

    pub fn vec_to_sparse(&self, comps: &[Poly]) -> SparseVec {
        let rank = comps.len();
        let mut v: SparseVec = Vec::new();
        for (comp, p) in comps.iter().enumerate() {
            v.extend(self.to_sparse(p, comp, rank));
        }
        v.sort_by_key(|(c, _)| *c);
        v
    }

    pub fn sparse_to_vec(&self, v: &SparseVec, rank: usize) -> Vec<Poly> {
        let mut out = vec![Poly::zero(); rank];
        for (col, val) in v {
            let (mi, comp) = (col / rank, col % rank);
            out[comp].add_term(self.monos[mi].clone(), val.clone());
        }
        out
    }

    /// Canonical representative of p modulo (f) + n^D.
    pub fn normal_form(&self, p: &Poly) -> Poly {
        let v = self.to_sparse(&p.truncate(self.quotient.ring.trunc), 0, 1);
        let red = self.ideal.reduce(&v);
        let out = self.sparse_to_vec(&red, 1);
        out.into_iter().next().unwrap()
    }

    pub fn normal_form_vec(&self, comps: &[Poly]) -> Vec<Poly> {
        comps.iter().map(|p| self.normal_form(p)).collect()
    }

    /// Membership in (f) + n^D.
    pub fn in_ideal(&self, p: &Poly) -> bool {
        self.normal_form(p).is_zero()
    }

    /// Is h (homogeneous of degree d) the initial form of an ideal element?
    /// Reduces h against ideal rows of pivot degree >= d only; the residue's
    /// degree-d block vanishes exactly when a witness exists.
    pub fn liftable_initial_form(&self, h: &Poly) -> bool {
        let Some(d) = h.ord() else { return false };
        debug_assert!(h.is_homogeneous());
        if d >= self.quotient.ring.trunc {
            return false;
        }
        let start = self.degree_start(d);
        let end = self.degree_start(d + 1);
        let v = self.to_sparse(h, 0, 1);
        let res = self.ideal.reduce_with_pivot_at_least(&v, start);
        res.iter().all(|(c, _)| *c < start || *c >= end)
    }

    pub fn ideal_rank(&self) -> usize {
        self.ideal.rank()
    }
}

/// Rank ladder for one module: ranks[n] = dim of (m^n F + N) inside V^r,
/// new_at[n] = monomial basis vectors first contributing at layer n.
#[derive(Debug, Clone)]
pub struct LayerLadder {
    pub ranks: Vec<usize>,
    pub new_at: Vec<Vec<(Monomial, usize)>>,
}

pub fn layer_ladder(m: &ModulePresentation) -> LayerLadder {
    let d = m.over.ring.trunc;
    let rank = m.rank;
    let table = RingTable::new(&m.over);
    let mut ech = Echelon::new();
    // N = span of monomial multiples of f_j e_i and of the columns of Phi
    for f in &m.over.relations {
        for comp in 0..rank {
            for mu in &table.monos {
                let w = f.mul_monomial(mu).truncate(d);
                let v = table.to_sparse(&w, comp, rank);
                ech.insert(v);
            }
        }
    }
    for t in 0..m.cols() {
        let col: Vec<Poly> = (0..rank).map(|i| m.phi[i][t].clone()).collect();
        for mu in &table.monos {
            let prod: Vec<Poly> = col.iter().map(|p| p.mul_monomial(mu).truncate(d)).collect();
            let v = table.vec_to_sparse(&prod);
            if !v.is_empty() {
                ech.insert(v);
            }
        }
    }
    let mut ranks = vec![0; d + 1];
    let mut new_at = vec![Vec::new(); d];
    ranks[d] = ech.rank();
    let one = m.over.ring.field.one();
    for n in (0..d).rev() {
        let start = table.degree_start(n);
        let end = table.degree_start(n + 1);
        for mi in start..end {
            for comp in 0..rank {
                let v: SparseVec = vec![(mi * rank + comp, one.clone())];
                if ech.insert(v).is_some() {
                    new_at[n].push((table.monos[mi].clone(), comp));
                }
            }
        }
        ranks[n] = ech.rank();
    }
    LayerLadder { ranks, new_at }
}

/// Exact k-basis of m^n M / m^{n+1} M, as (monomial, component) classes.
pub fn layer_basis(m: &ModulePresentation, n: usize) -> Result<Vec<(Monomial, usize)>, LocalError> {
    let d = m.over.ring.trunc;
    if n + 1 > d {
        return Err(LocalError::PrecisionExceeded { n, d });
    }
    Ok(layer_ladder(m).new_at[n].clone())
}

/// H(M,n) for n = 0..n_max. valid_to = min(n_max, D-2): the last index the
/// truncation certifies; later entries are reported but uncertified.
pub fn hilbert_function(m: &ModulePresentation, n_max: usize) -> Result<HilbertVector, LocalError> {
    let d = m.over.ring.trunc;
    if n_max + 1 > d {
        return Err(LocalError::PrecisionExceeded { n: n_max, d });
    }
    let ladder = layer_ladder(m);
    let values: Vec<usize> = (0..=n_max).map(|n| ladder.ranks[n] - ladder.ranks[n + 1]).collect();
    Ok(HilbertVector { values, valid_to: n_max.min(d.saturating_sub(2)) })
}
