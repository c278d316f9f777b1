//! Exact dense linear algebra (rref, kernel, solve) and the sparse
//! incremental echelon forms used by the spanning-set computations.
//!
//! Pivoting is always "first nonzero in column order", so every result is
//! deterministic and golden tests can compare output verbatim.

use crate::field::{FieldSpec, Scalar};
use std::collections::BTreeMap;

/// Dense matrix over a fixed field, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    pub rows: usize,
    pub cols: usize,
    pub field: FieldSpec,
    entries: Vec<Scalar>,
}

impl ExactMatrix {
    pub fn zero(rows: usize, cols: usize, field: FieldSpec) -> ExactMatrix {
        ExactMatrix { rows, cols, field, entries: vec![field.zero(); rows * cols] }
    }

    pub fn identity(n: usize, field: FieldSpec) -> ExactMatrix {
        let mut m = ExactMatrix::zero(n, n, field);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rows(field: FieldSpec, rows: Vec<Vec<Scalar>>) -> ExactMatrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        ExactMatrix { rows: r, cols: c, field, entries: rows.into_iter().flatten().collect() }
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> ExactMatrix {
        let mut t = ExactMatrix::zero(self.cols, self.rows, self.field);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = ExactMatrix::zero(self.rows, other.cols, self.field);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    out.set(i, j, out.get(i, j).add(&a.mul(b)));
                }
            }
        }
        out
    }

    /// Reduced row-echelon form with first-nonzero pivot choice.
    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let mut pivot_cols = Vec::new();
        let mut pr = 0;
        for c in 0..m.cols {
            let Some(pivot) = (pr..m.rows).find(|&r| !m.get(r, c).is_zero()) else {
                continue;
            };
            for j in 0..m.cols {
                let tmp = m.get(pr, j).clone();
                m.set(pr, j, m.get(pivot, j).clone());
                m.set(pivot, j, tmp);
            }
            let inv = m.get(pr, c).inv().expect("pivot is nonzero");
            for j in 0..m.cols {
                m.set(pr, j, m.get(pr, j).mul(&inv));
            }
            for r in 0..m.rows {
                if r != pr && !m.get(r, c).is_zero() {
                    let factor = m.get(r, c).clone();
                    for j in 0..m.cols {
                        let v = m.get(r, j).sub(&factor.mul(m.get(pr, j)));
                        m.set(r, j, v);
                    }
                }
            }
            pivot_cols.push(c);
            pr += 1;
            if pr == m.rows {
                break;
            }
        }
        Rref { rank: pivot_cols.len(), matrix: m, pivot_cols }
    }

    /// Basis of the right null space; dimension is cols - rank.
    pub fn kernel_basis(&self) -> Vec<Vec<Scalar>> {
        let rref = self.rref();
        let pivot_set: BTreeMap<usize, usize> =
            rref.pivot_cols.iter().enumerate().map(|(r, &c)| (c, r)).collect();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set.contains_key(&free) {
                continue;
            }
            let mut v = vec![self.field.zero(); self.cols];
            v[free] = self.field.one();
            for (&pc, &pr) in &pivot_set {
                v[pc] = rref.matrix.get(pr, free).neg();
            }
            basis.push(v);
        }
        basis
    }

    /// Some exact solution of self * x = b, or None when b is outside the
    /// column space. Free variables are set to zero, so with columns in a
    /// declared order the answer is the least one in that order.
    pub fn solve_linear(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(b.len(), self.rows, "rhs length");
        let mut aug = ExactMatrix::zero(self.rows, self.cols + 1, self.field);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let rref = aug.rref();
        if rref.pivot_cols.contains(&self.cols) {
            return None;
        }
        let mut x = vec![self.field.zero(); self.cols];
        for (r, &c) in rref.pivot_cols.iter().enumerate() {
            x[c] = rref.matrix.get(r, self.cols).clone();
        }
        Some(x)
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Exact inverse of a square matrix, or None when singular.
    pub fn inverse(&self) -> Option<ExactMatrix> {
        assert_eq!(self.rows, self.cols, "inverse needs a square matrix");
        let n = self.rows;
        let mut aug = ExactMatrix::zero(n, 2 * n, self.field);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, self.field.one());
        }
        let rref = aug.rref();
        if rref.pivot_cols.len() < n || rref.pivot_cols.iter().any(|&c| c >= n) {
            return None;
        }
        let mut inv = ExactMatrix::zero(n, n, self.field);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, rref.matrix.get(i, n + j).clone());
            }
        }
        Some(inv)
    }
}

#[derive(Debug, Clone)]
pub struct Rref {
    pub rank: usize,
    pub matrix: ExactMatrix,
    pub pivot_cols: Vec<usize>,
}

/// Sparse vector: (column, value) pairs sorted by column, values nonzero.
pub type SparseVec = Vec<(usize, Scalar)>;

/// a - c * b for sorted sparse vectors.
fn sparse_axpy(a: &SparseVec, c: &Scalar, b: &SparseVec) -> SparseVec {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some((ca, va)), Some((cb, _))) if ca < cb => {
                out.push((*ca, va.clone()));
                i += 1;
            }
            (Some((ca, va)), Some((cb, vb))) if ca == cb => {
                let v = va.sub(&c.mul(vb));
                if !v.is_zero() {
                    out.push((*ca, v));
                }
                i += 1;
                j += 1;
            }
            (_, Some((cb, vb))) => {
                let v = c.mul(vb).neg();
                if !v.is_zero() {
                    out.push((*cb, v));
                }
                j += 1;
            }
            (Some((ca, va)), None) => {
                out.push((*ca, va.clone()));
                i += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

fn sparse_scale(v: &mut SparseVec, c: &Scalar) {
    for (_, val) in v.iter_mut() {
        *val = val.mul(c);
    }
}

/// Incremental row echelon over sparse vectors. Rows are normalized to a
/// leading 1 but not back-eliminated; reduce() still returns the canonical
/// representative mod the row space because it clears every pivot column.
#[derive(Debug, Clone)]
pub struct Echelon {
    rows: Vec<SparseVec>,
    pivot_row: BTreeMap<usize, usize>,
}

impl Echelon {
    pub fn new() -> Echelon {
        Echelon { rows: Vec::new(), pivot_row: BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivot_row.keys().copied()
    }

    /// Insert a vector; returns the new pivot column if the rank grew.
    pub fn insert(&mut self, mut v: SparseVec) -> Option<usize> {
        loop {
            let Some((lead, lead_val)) = v.first().cloned() else {
                return None;
            };
            match self.pivot_row.get(&lead) {
                Some(&r) => {
                    v = sparse_axpy(&v, &lead_val, &self.rows[r]);
                }
                None => {
                    let inv = lead_val.inv().expect("leading entry nonzero");
                    sparse_scale(&mut v, &inv);
                    self.pivot_row.insert(lead, self.rows.len());
                    self.rows.push(v);
                    return Some(lead);
                }
            }
        }
    }

    /// Canonical residue of v modulo the row space: zero at every pivot column.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut v = v.clone();
        let mut i = 0;
        while i < v.len() {
            let (col, val) = v[i].clone();
            match self.pivot_row.get(&col) {
                Some(&r) => {
                    v = sparse_axpy(&v, &val, &self.rows[r]);
                    // entries below col are already pivot-free; restart scan there
                }
                None => {
                    i += 1;
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_empty()
    }

    /// Residue of v modulo the span of the rows whose pivot column is at
    /// least `bound`. Those rows have no support below their pivot, so this
    /// is the canonical residue mod that subspace.
    pub fn reduce_with_pivot_at_least(&self, v: &SparseVec, bound: usize) -> SparseVec {
        let mut v = v.clone();
        let mut i = 0;
        while i < v.len() {
            let (col, val) = v[i].clone();
            match self.pivot_row.get(&col) {
                Some(&r) if col >= bound => {
                    v = sparse_axpy(&v, &val, &self.rows[r]);
                }
                _ => {
                    i += 1;
                }
            }
        }
        v
    }
}

impl Default for Echelon {
    fn default() -> Self {
        Echelon::new()
    }
}

/// Kernel extraction by column insertion with combination history: columns
/// are fed in a declared order; each dependent column yields one kernel
/// vector supported on the columns seen so far (the RREF free-column basis).
#[derive(Debug, Clone)]
pub struct KernelSolver {
    field: FieldSpec,
    ech: Vec<(SparseVec, SparseVec)>,
    pivot_row: BTreeMap<usize, usize>,
    next_key: usize,
}

impl KernelSolver {
    pub fn new(field: FieldSpec) -> KernelSolver {
        KernelSolver { field, ech: Vec::new(), pivot_row: BTreeMap::new(), next_key: 0 }
    }

    pub fn rank(&self) -> usize {
        self.ech.len()
    }

    /// Feed the next column (its image vector). Returns Some(kernel vector in
    /// column coordinates, keyed by insertion index) when dependent.
    pub fn offer(&mut self, image: SparseVec) -> Option<SparseVec> {
        let key = self.next_key;
        self.next_key += 1;
        if image.is_empty() {
            return Some(vec![(key, self.field.one())]);
        }
        let mut img = image;
        let mut hist: SparseVec = vec![(key, self.field.one())];
        loop {
            let Some((lead, lead_val)) = img.first().cloned() else {
                return Some(hist);
            };
            match self.pivot_row.get(&lead) {
                Some(&r) => {
                    let (rimg, rhist) = &self.ech[r];
                    img = sparse_axpy(&img, &lead_val, rimg);
                    hist = sparse_axpy(&hist, &lead_val, rhist);
                }
                None => {
                    let inv = lead_val.inv().expect("leading entry nonzero");
                    sparse_scale(&mut img, &inv);
                    sparse_scale(&mut hist, &inv);
                    self.pivot_row.insert(lead, self.ech.len());
                    self.ech.push((img, hist));
                    return None;
                }
            }
        }
    }
}
