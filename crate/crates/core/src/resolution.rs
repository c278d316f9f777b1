//! Free resolutions over complete-intersection quotients: matrix
//! factorizations with their 2-periodic complexes, truncation-window syzygy
//! steps, Betti tables with a stability certificate, complexity estimates,
//! and the virtual projective dimension formula.
//!
//! Syzygies inside a truncation window are heuristic by nature: a vector can
//! pass the kernel test merely because its image falls off the window. The
//! engine therefore keeps a trust region (generators accepted only well below
//! the window top), counts everything above it as suspect, and certifies
//! results operationally by agreement between independent runs at D and D+2.

use crate::local::{LocalError, ModulePresentation, QuotientPresentation, RingTable};
use crate::matrix::KernelSolver;
use crate::monomial::Monomial;
use crate::poly::Poly;
use crate::series::{RingError, RingSpec};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ResolutionError {
    #[error("product identity fails at entry ({row},{col}): residue {residue}")]
    NotAFactorization { row: usize, col: usize, residue: String },
    #[error("matrices must be square and of equal size")]
    Shape,
    #[error("runs at D and D+2 disagree at index {step}: {first:?} vs {second:?}")]
    PrecisionUnstable { step: usize, first: Vec<usize>, second: Vec<usize> },
    #[error("certified window has {have} entries, need {need}")]
    WindowTooShort { have: usize, need: usize },
    #[error(transparent)]
    Local(#[from] LocalError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// A pair of square matrices over the ambient regular ring with
/// phi*psi = psi*phi = f*I. Entries stay polynomial so the defining products
/// are exact, never truncated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixFactorization {
    pub ring: RingSpec,
    pub f: Poly,
    pub phi: Vec<Vec<Poly>>,
    pub psi: Vec<Vec<Poly>>,
}

impl MatrixFactorization {
    pub fn new(
        ring: RingSpec,
        f: Poly,
        phi: Vec<Vec<Poly>>,
        psi: Vec<Vec<Poly>>,
    ) -> Result<MatrixFactorization, ResolutionError> {
        let s = phi.len();
        if s == 0
            || phi.iter().any(|row| row.len() != s)
            || psi.len() != s
            || psi.iter().any(|row| row.len() != s)
        {
            return Err(ResolutionError::Shape);
        }
        Ok(MatrixFactorization { ring, f, phi, psi })
    }

    pub fn size(&self) -> usize {
        self.phi.len()
    }

    /// coker(phi) as a module over Q/(f), ready for the resolution engine.
    pub fn module(&self) -> Result<ModulePresentation, ResolutionError> {
        let over = QuotientPresentation::new(self.ring.clone(), vec![self.f.clone()])?;
        Ok(ModulePresentation::new(over, self.size(), self.phi.clone())?)
    }
}

/// Exact polynomial product of row-major matrices, no truncation.
pub(crate) fn poly_mat_mul(a: &[Vec<Poly>], b: &[Vec<Poly>]) -> Vec<Vec<Poly>> {
    let (n, k) = (a.len(), b.len());
    let m = b.first().map_or(0, |row| row.len());
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut acc = Poly::zero();
                    for t in 0..k {
                        acc = acc.add(&a[i][t].mul(&b[t][j]));
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Check both defining identities exactly; the error names the first entry
/// whose residue against delta_ij * f is nonzero.
pub fn mf_verify(mf: &MatrixFactorization) -> Result<(), ResolutionError> {
    for (name, prod) in [("phi*psi", poly_mat_mul(&mf.phi, &mf.psi)), ("psi*phi", poly_mat_mul(&mf.psi, &mf.phi))] {
        let _ = name;
        for (row, rvec) in prod.iter().enumerate() {
            for (col, entry) in rvec.iter().enumerate() {
                let expected = if row == col { mf.f.clone() } else { Poly::zero() };
                let residue = entry.sub(&expected);
                if !residue.is_zero() {
                    return Err(ResolutionError::NotAFactorization {
                        row,
                        col,
                        residue: residue.render(&mf.ring.vars),
                    });
                }
            }
        }
    }
    Ok(())
}

/// A complex of free modules over A with explicit differentials;
/// diffs[i] maps F_{i+1} to F_i, row-major ranks[i] by ranks[i+1].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeComplex {
    pub over: QuotientPresentation,
    pub ranks: Vec<usize>,
    pub diffs: Vec<Vec<Vec<Poly>>>,
    /// true when every differential entry lies in the maximal ideal
    pub minimal: bool,
}

impl FreeComplex {
    /// Verify every consecutive composite vanishes in A (inside the window);
    /// the error witnesses the first failing entry.
    pub fn verify_composites(&self) -> Result<(), ResolutionError> {
        let table = RingTable::new(&self.over);
        let ring = &self.over.ring;
        for i in 0..self.diffs.len().saturating_sub(1) {
            let (a, b) = (&self.diffs[i], &self.diffs[i + 1]);
            for row in 0..self.ranks[i] {
                for col in 0..self.ranks[i + 2] {
                    let mut acc = Poly::zero();
                    for t in 0..self.ranks[i + 1] {
                        acc = ring.add(&acc, &ring.mul(&a[row][t], &b[t][col]));
                    }
                    if !table.in_ideal(&acc) {
                        return Err(ResolutionError::NotAFactorization {
                            row,
                            col,
                            residue: table.normal_form(&acc).render(&ring.vars),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn entries_minimal(phi: &[Vec<Poly>]) -> bool {
    phi.iter().flatten().all(|e| e.ord() != Some(0))
}

/// The 2-periodic resolution of coker(phi) over A = Q/(f): differentials
/// alternate phi, psi, phi, .. for `n` steps.
pub fn mf_resolution(mf: &MatrixFactorization, n: usize) -> Result<FreeComplex, ResolutionError> {
    mf_verify(mf)?;
    let over = QuotientPresentation::new(mf.ring.clone(), vec![mf.f.clone()])?;
    let trunc = |m: &[Vec<Poly>]| -> Vec<Vec<Poly>> {
        m.iter()
            .map(|row| row.iter().map(|e| e.truncate(over.ring.trunc)).collect())
            .collect()
    };
    let diffs: Vec<Vec<Vec<Poly>>> = (0..n)
        .map(|i| if i % 2 == 0 { trunc(&mf.phi) } else { trunc(&mf.psi) })
        .collect();
    let minimal = diffs.iter().all(|d| entries_minimal(d));
    let complex = FreeComplex { over, ranks: vec![mf.size(); n + 1], diffs, minimal };
    complex.verify_composites()?;
    Ok(complex)
}

/// Strip unit entries from a presentation by row and column operations:
/// a unit pivot splits off a trivial summand, so the row and column are
/// eliminated and deleted. The result presents the same module with
/// every entry in the maximal ideal.
pub fn minimalize(m: &ModulePresentation) -> ModulePresentation {
    let ring = m.over.ring.clone();
    let mut phi = m.phi.clone();
    loop {
        let Some((pi, pj)) = (0..phi.len())
            .flat_map(|i| (0..phi[i].len()).map(move |j| (i, j)))
            .find(|&(i, j)| phi[i][j].ord() == Some(0))
        else {
            break;
        };
        let uinv = ring.invert_unit(&phi[pi][pj]).expect("ord 0 entry is a unit");
        let cols = phi[0].len();
        // column operations clear row pi outside the pivot
        for j in 0..cols {
            if j == pj {
                continue;
            }
            let factor = ring.mul(&phi[pi][j], &uinv);
            for i in 0..phi.len() {
                let sub = ring.mul(&factor, &phi[i][pj]);
                phi[i][j] = ring.sub(&phi[i][j], &sub);
            }
        }
        // row operations clear column pj outside the pivot
        for i in 0..phi.len() {
            if i == pi {
                continue;
            }
            let factor = ring.mul(&phi[i][pj], &uinv);
            for j in 0..cols {
                let sub = ring.mul(&factor, &phi[pi][j]);
                phi[i][j] = ring.sub(&phi[i][j], &sub);
            }
        }
        phi.remove(pi);
        for row in &mut phi {
            row.remove(pj);
        }
        if phi.is_empty() {
            break;
        }
    }
    let rank = phi.len();
    ModulePresentation::new(m.over.clone(), rank, phi).expect("shape preserved")
}

/// One syzygy step: a minimal generating set of ker(A^s -> A^r) for the
/// presentation matrix, computed inside the truncation window.
#[derive(Debug, Clone)]
pub struct SyzygyStep {
    /// the presentation the generators refer to; redundant relation columns
    /// found during the step are already dropped here
    pub presentation: ModulePresentation,
    /// columns of the next differential, entries trimmed to the trust bound
    pub gens: Vec<Vec<Poly>>,
    /// rank-increasing candidates living above the trust bound: possible
    /// truncation artifacts, excluded from gens and flagged for the
    /// stability protocol
    pub suspects: usize,
    /// generators accepted only with order <= this bound
    pub trust_bound: usize,
    /// orders >= this pass the kernel test vacuously
    pub window_top: usize,
}

/// Kernel generators of the presentation matrix modulo m*(kernel), inside
/// the window. Unit entries must be stripped first (see minimalize); a
/// relation column dependent on the others is detected via an order-zero
/// syzygy and dropped, then the step restarts.
pub fn syzygy_step(m: &ModulePresentation) -> Result<SyzygyStep, ResolutionError> {
    let mut current = m.clone();
    loop {
        match syzygy_step_once(&current)? {
            Ok(step) => return Ok(step),
            Err(redundant_col) => {
                let mut phi = current.phi.clone();
                for row in &mut phi {
                    row.remove(redundant_col);
                }
                current = ModulePresentation::new(current.over.clone(), current.rank, phi)?;
            }
        }
    }
}

/// Inner worker: Ok(step) on success, Err(column) when an order-zero syzygy
/// exposes a redundant relation column.
fn syzygy_step_once(m: &ModulePresentation) -> Result<Result<SyzygyStep, usize>, ResolutionError> {
    let d = m.over.ring.trunc;
    let r = m.rank;
    let s = m.cols();
    let nv = m.over.ring.nvars();
    let field = m.over.ring.field;
    assert!(entries_minimal(&m.phi), "presentation has unit entries; minimalize first");

    let zero_matrix = m.phi.iter().flatten().all(|e| e.is_zero());
    if s == 0 || zero_matrix {
        // free module: the zero resolution, exact with no caveats
        return Ok(Ok(SyzygyStep {
            presentation: m.clone(),
            gens: Vec::new(),
            suspects: 0,
            trust_bound: d,
            window_top: d,
        }));
    }

    let table = RingTable::new(&m.over);
    // max monomial degree across the matrix controls where the kernel test
    // loses meaning: deg(u) >= T makes Phi*u fall off the window entirely
    let d_phi = m
        .phi
        .iter()
        .flatten()
        .filter_map(|e| e.degree())
        .max()
        .expect("nonzero matrix");
    let d_min = m
        .phi
        .iter()
        .flatten()
        .filter_map(|e| e.ord())
        .min()
        .expect("nonzero matrix");
    let window_top = d.saturating_sub(d_phi);
    let trust_bound = window_top.saturating_sub(d_min + 1);
    if trust_bound < 1 {
        return Err(ResolutionError::WindowTooShort { have: window_top, need: d_min + 2 });
    }

    // kernel of u -> NF(Phi u) over domain vectors mu*e_j, deg(mu) < T
    let mut solver = KernelSolver::new(field);
    let mut keys: Vec<(usize, Monomial)> = Vec::new();
    let mut kernel: Vec<Vec<Poly>> = Vec::new();
    for j in 0..s {
        for mu in table.monos.iter().filter(|mu| mu.degree() < window_top) {
            let image: Vec<Poly> = (0..r)
                .map(|i| table.normal_form(&m.phi[i][j].mul_monomial(mu).truncate(d)))
                .collect();
            let offered = table.vec_to_sparse(&image);
            keys.push((j, mu.clone()));
            if let Some(k) = solver.offer(offered) {
                // expand combination over domain keys into a c-vector
                let mut u = vec![Poly::zero(); s];
                for (key, coeff) in &k {
                    let (jj, mm) = &keys[*key];
                    u[*jj].add_term(mm.clone(), coeff.clone());
                }
                let u = table.normal_form_vec(&u);
                if u.iter().any(|p| !p.is_zero()) {
                    kernel.push(u);
                }
            }
        }
    }

    // span of m*(kernel): products capped just above the window top, where
    // trusted content ends
    let cap = (window_top + 1).min(d);
    let mut ech = crate::matrix::Echelon::new();
    for k in &kernel {
        for v in 0..nv {
            let prod: Vec<Poly> = k
                .iter()
                .map(|p| table.normal_form(&p.mul_monomial(&Monomial::var(nv, v)).truncate(cap)))
                .collect();
            let flat = table.vec_to_sparse(&prod);
            if !flat.is_empty() {
                ech.insert(flat);
            }
        }
    }

    // candidates ascending by order, stable in discovery order; a candidate
    // whose residue still increases the rank is a fresh generator class
    let mut order: Vec<usize> = (0..kernel.len()).collect();
    order.sort_by_key(|&i| vec_ord(&kernel[i]));
    let mut gens: Vec<Vec<Poly>> = Vec::new();
    let mut suspects = 0usize;
    for i in order {
        let flat = table.vec_to_sparse(&kernel[i]);
        let red = ech.reduce(&flat);
        if red.is_empty() {
            continue;
        }
        let rep = table.sparse_to_vec(&red, s);
        let rep_ord = vec_ord(&rep).expect("nonzero residue");
        if rep_ord == 0 {
            // unit coefficient: this syzygy says one relation column is a
            // combination of the others; report it for deletion
            let col = rep
                .iter()
                .position(|p| p.ord() == Some(0))
                .expect("order zero component");
            return Ok(Err(col));
        }
        ech.insert(red);
        if rep_ord <= trust_bound {
            let trimmed: Vec<Poly> = rep.iter().map(|p| p.truncate(trust_bound + 1)).collect();
            gens.push(trimmed);
        } else {
            suspects += 1;
        }
    }
    assert!(
        gens.iter().flatten().all(|e| e.ord() != Some(0)),
        "syzygy generators must lie in the maximal ideal"
    );
    Ok(Ok(SyzygyStep { presentation: m.clone(), gens, suspects, trust_bound, window_top }))
}

/// min over components of ord, None when the vector is zero
fn vec_ord(v: &[Poly]) -> Option<usize> {
    v.iter().filter_map(|p| p.ord()).min()
}

/// A computed minimal free resolution prefix with per-step diagnostics.
#[derive(Debug, Clone)]
pub struct Resolution {
    pub complex: FreeComplex,
    /// betti[i] = rank of F_i; trailing zeros are filled in once the
    /// resolution terminates with a clean (suspect-free) step
    pub betti: Vec<usize>,
    pub suspects: Vec<usize>,
    /// true when a suspect-free step returned no generators
    pub terminated: bool,
}

/// Chain syzygy steps to a resolution prefix of the given length.
pub fn resolve(m: &ModulePresentation, steps: usize) -> Result<Resolution, ResolutionError> {
    let m0 = minimalize(m);
    let mut betti = vec![m0.rank];
    let mut ranks = vec![m0.rank];
    let mut diffs: Vec<Vec<Vec<Poly>>> = Vec::new();
    let mut suspects: Vec<usize> = Vec::new();
    let mut terminated = false;
    let mut current = m0;
    for _ in 0..steps {
        let step = syzygy_step(&current)?;
        let cleaned = step.presentation;
        betti.push(cleaned.cols());
        ranks.push(cleaned.cols());
        diffs.push(cleaned.phi.clone());
        suspects.push(step.suspects);
        if step.gens.is_empty() {
            terminated = step.suspects == 0;
            break;
        }
        // generators become the columns of the next presentation matrix
        let next_rank = cleaned.cols();
        let phi: Vec<Vec<Poly>> = (0..next_rank)
            .map(|i| step.gens.iter().map(|g| g[i].clone()).collect())
            .collect();
        current = ModulePresentation::new(cleaned.over.clone(), next_rank, phi)?;
    }
    if terminated {
        while betti.len() < steps + 1 {
            betti.push(0);
            suspects.push(0);
        }
    }
    let minimal = diffs.iter().all(|d| entries_minimal(d));
    let complex = FreeComplex { over: m.over.clone(), ranks, diffs, minimal };
    Ok(Resolution { complex, betti, suspects, terminated })
}

/// Betti numbers with a stability certificate from independent runs at
/// truncations D and D+2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BettiTable {
    pub betti: Vec<usize>,
    /// largest homological index through which the runs at both truncations
    /// agree; entries beyond it are uncertified evidence
    pub certified_to: usize,
    pub truncs: (usize, usize),
}

/// Run the chain at D and D+2 and certify the agreement prefix. A true
/// generator sitting just above the trust bound at D falls inside it at D+2
/// and shows up as a disagreement; truncation junk instead rides along with
/// the window top and leaves the counts identical. Failing to agree even at
/// the presentation level is a hard inconsistency.
pub fn betti_table(m: &ModulePresentation, steps: usize) -> Result<BettiTable, ResolutionError> {
    let d = m.over.ring.trunc;
    let lo = resolve(m, steps)?;
    let hi = resolve(&m.with_trunc(d + 2), steps)?;
    let overlap = lo.betti.len().min(hi.betti.len());
    let agree = (0..overlap)
        .take_while(|&i| lo.betti[i] == hi.betti[i])
        .count();
    if agree < 2 {
        return Err(ResolutionError::PrecisionUnstable {
            step: agree,
            first: lo.betti.clone(),
            second: hi.betti.clone(),
        });
    }
    Ok(BettiTable { betti: lo.betti, certified_to: agree - 1, truncs: (d, d + 2) })
}

/// Growth evidence from a certified Betti window: bounded means the window
/// supports complexity <= 1. This is window evidence, not a proof.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexityEstimate {
    pub cx_upper_evidence: usize,
    pub bounded: bool,
}

/// Estimate complexity from the certified window of a Betti table:
/// an all-zero tail half means a finite resolution (complexity 0); a tail
/// half bounded by the first half means bounded Betti numbers (complexity
/// <= 1); otherwise recurse on successive differences, one degree per level.
pub fn complexity_estimate(b: &BettiTable) -> Result<ComplexityEstimate, ResolutionError> {
    let window = &b.betti[..=b.certified_to];
    if window.len() < 6 {
        return Err(ResolutionError::WindowTooShort { have: window.len(), need: 6 });
    }
    let cx = cx_of(window);
    Ok(ComplexityEstimate { cx_upper_evidence: cx, bounded: cx <= 1 })
}

pub(crate) fn cx_of(w: &[usize]) -> usize {
    let tail = &w[w.len() - w.len() / 2..];
    let head = &w[..w.len() - w.len() / 2];
    if tail.iter().all(|&x| x == 0) {
        return 0;
    }
    if tail.iter().max() <= head.iter().max() {
        return 1;
    }
    let diffs: Vec<usize> = w.windows(2).map(|p| p[1].saturating_sub(p[0])).collect();
    1 + cx_of(&diffs)
}

/// depth A - depth M + cx: the virtual projective dimension value. For a
/// maximal Cohen-Macaulay module over a Cohen-Macaulay ring the depths
/// cancel and the value is the complexity itself.
pub fn vpd_formula(depth_a: usize, depth_m: usize, cx: usize) -> i64 {
    depth_a as i64 - depth_m as i64 + cx as i64
}
