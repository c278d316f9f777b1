//! Independent combinatorial oracle: numerical semigroup rings
//! K[[t^a1, .., t^ak]], their Hilbert functions via sumset filtrations,
//! Frobenius data, and verification of power-series presentations.
//!
//! Everything here is exact integer combinatorics with no truncation
//! caveat, which is exactly what makes it useful as a cross-check on the
//! power-series engine.

use crate::local::{hilbert_function, HilbertVector, LocalError, ModulePresentation, QuotientPresentation};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SemigroupError {
    #[error("generators must be nonempty and nonzero")]
    Empty,
    #[error("gcd of generators is {gcd}, not 1")]
    GcdNotOne { gcd: u64 },
    #[error(transparent)]
    Local(#[from] LocalError),
}

/// Additive submonoid of the naturals with finite complement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumericalSemigroup {
    /// minimal generators, ascending
    pub generators: Vec<u64>,
    /// integers not in the semigroup, ascending
    pub gaps: Vec<u64>,
    /// largest integer outside, -1 when the semigroup is all of the naturals
    pub frobenius: i64,
    /// least member of each residue class mod the multiplicity, by residue
    pub apery: Vec<u64>,
    /// true when the input list contained redundant generators
    pub normalized: bool,
}

impl NumericalSemigroup {
    /// multiplicity: the least nonzero member
    pub fn multiplicity(&self) -> u64 {
        self.generators[0]
    }

    /// embedding dimension: the number of minimal generators
    pub fn embdim(&self) -> usize {
        self.generators.len()
    }

    pub fn contains(&self, x: u64) -> bool {
        x as i64 > self.frobenius || self.gaps.binary_search(&x).is_err()
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// Membership sieve on [0, bound].
fn sieve(generators: &[u64], bound: usize) -> Vec<bool> {
    let mut member = vec![false; bound + 1];
    member[0] = true;
    for x in 1..=bound {
        member[x] = generators
            .iter()
            .any(|&a| x as u64 >= a && member[x - a as usize]);
    }
    member
}

/// Close a generator list into the full semigroup: gaps, Frobenius number,
/// Apery set. Redundant generators are dropped (flagged via `normalized`).
/// Termination and exactness: once the sieve shows a run of `multiplicity`
/// consecutive members, every larger integer is a member too.
pub fn semigroup_closure(generators: &[u64]) -> Result<NumericalSemigroup, SemigroupError> {
    let mut gens: Vec<u64> = generators.iter().copied().filter(|&a| a > 0).collect();
    if gens.is_empty() {
        return Err(SemigroupError::Empty);
    }
    gens.sort_unstable();
    gens.dedup();
    let g = gens.iter().copied().fold(0, gcd);
    if g != 1 {
        return Err(SemigroupError::GcdNotOne { gcd: g });
    }
    let e = gens[0] as usize;
    // Schur's bound F < (a_1 - 1)(a_k - 1) caps the search; the run test
    // below certifies the actual cutoff
    let cap = (gens[0] as usize - 1) * (gens[gens.len() - 1] as usize - 1) + e + 1;
    let member = sieve(&gens, cap);
    let mut frobenius: i64 = -1;
    {
        let mut run = 0usize;
        let mut certified = false;
        for x in 0..=cap {
            if member[x] {
                run += 1;
                if run >= e {
                    certified = true;
                    break;
                }
            } else {
                run = 0;
                frobenius = x as i64;
            }
        }
        assert!(certified, "sieve cap too small for {gens:?}");
    }
    let gaps: Vec<u64> = (0..=cap)
        .filter(|&x| !member[x] && (x as i64) <= frobenius)
        .map(|x| x as u64)
        .collect();
    // minimal generators: not a sum of two nonzero members
    let minimal: Vec<u64> = gens
        .iter()
        .copied()
        .filter(|&a| {
            !(1..a).any(|b| member.get(b as usize) == Some(&true) && member.get((a - b) as usize) == Some(&true))
        })
        .collect();
    let normalized = minimal.len() != generators.len() || minimal != generators;
    // Apery set wrt the multiplicity: least member in each class mod e;
    // all of them are at most F + e, inside the sieve window
    let mut apery = vec![u64::MAX; e];
    for x in 0..=cap {
        if member[x] && apery[x % e] == u64::MAX {
            apery[x % e] = x as u64;
        }
    }
    assert!(apery.iter().all(|&w| w != u64::MAX));
    Ok(NumericalSemigroup { generators: minimal, gaps, frobenius, apery, normalized })
}

/// The sumset filtration S_n = {n-fold sums of generators} + S as explicit
/// finite sets on [0, bound]; `bound` exceeds F + n_max*max(a) so every
/// membership decision for n <= n_max + 1 is exact in the window where
/// filtration differences can live.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumsetFiltration {
    pub sets: Vec<Vec<u64>>,
    pub bound: u64,
}

impl SumsetFiltration {
    /// S_n \ S_{n+1}, defined for n < sets.len() - 1
    pub fn difference(&self, n: usize) -> Vec<u64> {
        self.sets[n]
            .iter()
            .copied()
            .filter(|x| self.sets[n + 1].binary_search(x).is_err())
            .collect()
    }
}

fn filtration_bound(s: &NumericalSemigroup, n_max: usize) -> usize {
    let amax = *s.generators.last().unwrap() as usize;
    // one step beyond the guaranteed-membership threshold F + (n_max+1)*amax
    (s.frobenius.max(0) as usize) + (n_max + 2) * amax + 1
}

/// Explicit filtration sets S_0..S_{n_max+1} clipped to the bound.
pub fn sumset_filtration(generators: &[u64], n_max: usize) -> Result<SumsetFiltration, SemigroupError> {
    let s = semigroup_closure(generators)?;
    let bound = filtration_bound(&s, n_max);
    let ord = filtration_orders(&s, n_max, bound);
    let sets: Vec<Vec<u64>> = (0..=n_max + 1)
        .map(|n| {
            (0..=bound)
                .filter(|&x| ord[x].map_or(false, |o| o >= n))
                .map(|x| x as u64)
                .collect()
        })
        .collect();
    Ok(SumsetFiltration { sets, bound: bound as u64 })
}

/// ord[x] = the largest n <= n_max + 1 with x in S_n, None for x outside S.
/// Recursion: a nonzero member always arises as (member) + (generator), so
/// ord(x) = 1 + max over generators a with x - a in S of ord(x - a).
fn filtration_orders(s: &NumericalSemigroup, n_max: usize, bound: usize) -> Vec<Option<usize>> {
    let cap = n_max + 1;
    let mut ord: Vec<Option<usize>> = vec![None; bound + 1];
    ord[0] = Some(0);
    for x in 1..=bound {
        if !s.contains(x as u64) {
            continue;
        }
        let best = s
            .generators
            .iter()
            .filter(|&&a| x as u64 >= a)
            .filter_map(|&a| ord[x - a as usize])
            .max();
        ord[x] = Some(best.map_or(0, |b| (b + 1).min(cap)));
    }
    ord
}

/// Hilbert function of the semigroup ring: H(n) = |S_n \ S_{n+1}|, exact for
/// all n <= n_max. H(0) = 1, H(1) = embedding dimension, and H stabilizes at
/// the multiplicity.
pub fn semigroup_hf(generators: &[u64], n_max: usize) -> Result<HilbertVector, SemigroupError> {
    let s = semigroup_closure(generators)?;
    let bound = filtration_bound(&s, n_max);
    let ord = filtration_orders(&s, n_max, bound);
    let mut values = vec![0usize; n_max + 1];
    for o in ord.iter().flatten() {
        if *o <= n_max {
            values[*o] += 1;
        }
    }
    Ok(HilbertVector { values, valid_to: n_max })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PresentationVerdict {
    Verified,
    /// relation at this index does not vanish under X_i -> t^{a_i}
    RelationFails { index: usize },
    /// Hilbert functions disagree first at this degree
    HilbertMismatch { degree: usize },
}

/// Check that a power-series quotient presents the semigroup ring: every
/// relation must vanish under X_i -> t^{a_i} (exact exponent arithmetic),
/// and the two Hilbert functions must agree for n <= n_max.
pub fn verify_presentation(
    generators: &[u64],
    candidate: &QuotientPresentation,
    n_max: usize,
) -> Result<PresentationVerdict, SemigroupError> {
    assert_eq!(
        candidate.ring.vars.len(),
        generators.len(),
        "one variable per semigroup generator"
    );
    for (index, f) in candidate.relations.iter().enumerate() {
        if !f.substitute_exponents(generators).is_empty() {
            return Ok(PresentationVerdict::RelationFails { index });
        }
    }
    let oracle = semigroup_hf(generators, n_max)?;
    let local = hilbert_function(&ModulePresentation::cyclic(candidate.clone()), n_max)?;
    for n in 0..=n_max {
        if oracle.values[n] != local.values[n] {
            return Ok(PresentationVerdict::HilbertMismatch { degree: n });
        }
    }
    Ok(PresentationVerdict::Verified)
}

/// Search-space limits for the monotonicity scan. The Frobenius cap is what
/// makes the space finite: minimal generators of a semigroup with Frobenius
/// number F and multiplicity e never exceed F + e.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanConstraints {
    pub max_embdim: usize,
    pub max_mult: u64,
    pub max_frobenius: i64,
    pub n_max: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanViolation {
    pub generators: Vec<u64>,
    /// first degree with H(n) > H(n+1)
    pub degree: usize,
    pub values: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanReport {
    pub checked: usize,
    pub embdim3_checked: usize,
    pub violations: Vec<ScanViolation>,
}

/// Enumerate every numerical semigroup within the constraints, one entry per
/// distinct semigroup (canonical minimal generator tuple, lexicographic).
pub fn scan_candidates(c: &ScanConstraints) -> Vec<Vec<u64>> {
    let mut out: Vec<Vec<u64>> = Vec::new();
    let hi = |mult: u64| mult + c.max_frobenius.max(0) as u64;
    if c.max_embdim >= 1 {
        out.push(vec![1]);
    }
    for a in 2..=c.max_mult {
        if c.max_embdim < 2 {
            break;
        }
        for b in a + 1..=hi(a) {
            if gcd(a, b) == 1 && b % a != 0 {
                if let Ok(s) = semigroup_closure(&[a, b]) {
                    if s.frobenius <= c.max_frobenius && s.generators == [a, b] {
                        out.push(vec![a, b]);
                    }
                }
            }
            if c.max_embdim < 3 {
                continue;
            }
            for cc in b + 1..=hi(a) {
                if gcd(gcd(a, b), cc) != 1 {
                    continue;
                }
                if let Ok(s) = semigroup_closure(&[a, b, cc]) {
                    if s.frobenius <= c.max_frobenius && s.generators == [a, b, cc] {
                        out.push(vec![a, b, cc]);
                    }
                }
            }
        }
    }
    out
}

/// Scan the constrained range for Hilbert functions that fail to be
/// non-decreasing. Report order follows the canonical enumeration order.
pub fn monotonicity_scan(c: &ScanConstraints) -> ScanReport {
    let candidates = scan_candidates(c);
    let mut report = ScanReport { checked: 0, embdim3_checked: 0, violations: Vec::new() };
    for gens in candidates {
        let hf = semigroup_hf(&gens, c.n_max).expect("enumerated gens have gcd 1");
        report.checked += 1;
        if gens.len() == 3 {
            report.embdim3_checked += 1;
        }
        if let Some(degree) = first_decrease(&hf.values) {
            report.violations.push(ScanViolation { generators: gens, degree, values: hf.values });
        }
    }
    report
}

/// First n with values[n] > values[n+1], if any.
pub fn first_decrease(values: &[usize]) -> Option<usize> {
    (0..values.len().saturating_sub(1)).find(|&n| values[n] > values[n + 1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use crate::series::RingSpec;

    const Q: FieldSpec = FieldSpec::Rationals;

    #[test]
    fn closure_of_example_semigroup() {
        let s = semigroup_closure(&[6, 7, 15]).unwrap();
        assert_eq!(s.frobenius, 23);
        assert_eq!(s.gaps, vec![1, 2, 3, 4, 5, 8, 9, 10, 11, 16, 17, 23]);
        assert_eq!(s.generators, vec![6, 7, 15]);
        assert!(!s.normalized);
        assert_eq!(s.multiplicity(), 6);
        assert_eq!(s.embdim(), 3);
    }

    #[test]
    fn closure_of_small_semigroups() {
        let s = semigroup_closure(&[2, 3]).unwrap();
        assert_eq!(s.frobenius, 1);
        assert_eq!(s.gaps, vec![1]);
        let n = semigroup_closure(&[1]).unwrap();
        assert_eq!(n.frobenius, -1);
        assert!(n.gaps.is_empty());
    }

    #[test]
    fn gcd_failure_is_reported() {
        assert_eq!(semigroup_closure(&[4, 6]), Err(SemigroupError::GcdNotOne { gcd: 2 }));
        assert_eq!(semigroup_closure(&[0]), Err(SemigroupError::Empty));
    }

    #[test]
    fn redundant_generators_are_normalized() {
        let s = semigroup_closure(&[6, 7, 13, 15]).unwrap();
        assert_eq!(s.generators, vec![6, 7, 15]);
        assert!(s.normalized);
    }

    #[test]
    fn apery_set_of_example() {
        let s = semigroup_closure(&[6, 7, 15]).unwrap();
        // least member in each class mod 6
        assert_eq!(s.apery, vec![0, 7, 14, 15, 22, 29]);
    }

    #[test]
    fn example_hilbert_function_and_differences() {
        let hf = semigroup_hf(&[6, 7, 15], 9).unwrap();
        assert_eq!(hf.values, vec![1, 3, 4, 5, 5, 6, 6, 6, 6, 6]);
        let filt = sumset_filtration(&[6, 7, 15], 4).unwrap();
        assert_eq!(filt.difference(2), vec![12, 13, 14, 22]);
        assert_eq!(filt.difference(3), vec![18, 19, 20, 21, 29]);
    }

    #[test]
    fn small_hilbert_functions() {
        assert_eq!(semigroup_hf(&[2, 3], 5).unwrap().values, vec![1, 2, 2, 2, 2, 2]);
        assert_eq!(semigroup_hf(&[1], 4).unwrap().values, vec![1, 1, 1, 1, 1]);
    }

    #[test]
    fn filtration_is_decreasing() {
        let filt = sumset_filtration(&[6, 7, 15], 5).unwrap();
        for n in 0..filt.sets.len() - 1 {
            for x in &filt.sets[n + 1] {
                assert!(filt.sets[n].binary_search(x).is_ok());
            }
        }
    }

    fn example_ring(trunc: usize) -> QuotientPresentation {
        let vars = ["X", "Y", "Z"].iter().map(|s| s.to_string()).collect();
        let r = RingSpec::new(vars, trunc, Q).unwrap();
        let f1 = r.parse("Y^3 - X*Z").unwrap();
        let f2 = r.parse("X^5 - Z^2").unwrap();
        QuotientPresentation::new(r, vec![f1, f2]).unwrap()
    }

    #[test]
    fn example_presentation_is_verified() {
        let verdict = verify_presentation(&[6, 7, 15], &example_ring(12), 9).unwrap();
        assert_eq!(verdict, PresentationVerdict::Verified);
    }

    #[test]
    fn cusp_presentation_is_verified() {
        let vars = ["X", "Y"].iter().map(|s| s.to_string()).collect();
        let r = RingSpec::new(vars, 10, Q).unwrap();
        let f = r.parse("X^3 - Y^2").unwrap();
        let a = QuotientPresentation::new(r, vec![f]).unwrap();
        assert_eq!(verify_presentation(&[2, 3], &a, 8).unwrap(), PresentationVerdict::Verified);
    }

    #[test]
    fn wrong_exponent_fails_the_relation_check() {
        let vars = ["X", "Y", "Z"].iter().map(|s| s.to_string()).collect();
        let r = RingSpec::new(vars, 12, Q).unwrap();
        let f1 = r.parse("Y^3 - X*Z").unwrap();
        let f2 = r.parse("X^4 - Z^2").unwrap();
        let a = QuotientPresentation::new(r, vec![f1, f2]).unwrap();
        let verdict = verify_presentation(&[6, 7, 15], &a, 6).unwrap();
        assert_eq!(verdict, PresentationVerdict::RelationFails { index: 1 });
    }

    #[test]
    fn underdetermined_presentation_fails_by_hilbert_mismatch() {
        // one relation cuts too little: the quotient grows past the oracle
        let vars = ["X", "Y", "Z"].iter().map(|s| s.to_string()).collect();
        let r = RingSpec::new(vars, 12, Q).unwrap();
        let f1 = r.parse("Y^3 - X*Z").unwrap();
        let a = QuotientPresentation::new(r, vec![f1]).unwrap();
        let verdict = verify_presentation(&[6, 7, 15], &a, 9).unwrap();
        assert!(matches!(verdict, PresentationVerdict::HilbertMismatch { .. }));
    }

    #[test]
    fn hilbert_tail_is_multiplicity() {
        let hf = semigroup_hf(&[6, 7, 15], 14).unwrap();
        assert!(hf.values[5..].iter().all(|&v| v == 6));
        let hf = semigroup_hf(&[3, 5], 8).unwrap();
        assert!(hf.values[2..].iter().all(|&v| v == 3));
    }

    #[test]
    fn scan_enumerates_distinct_minimal_semigroups() {
        let c = ScanConstraints { max_embdim: 3, max_mult: 4, max_frobenius: 12, n_max: 6 };
        let cands = scan_candidates(&c);
        assert!(cands.contains(&vec![1]));
        assert!(cands.contains(&vec![2, 3]));
        assert!(cands.contains(&vec![3, 4, 5]));
        // no duplicates, all minimal, all within constraints
        let mut seen = std::collections::BTreeSet::new();
        for g in &cands {
            assert!(seen.insert(g.clone()), "duplicate {g:?}");
            let s = semigroup_closure(g).unwrap();
            assert_eq!(&s.generators, g);
            assert!(s.frobenius <= 12);
            assert!(s.multiplicity() <= 4);
        }
    }

    #[test]
    fn scan_of_small_range_finds_no_violations() {
        let c = ScanConstraints { max_embdim: 3, max_mult: 5, max_frobenius: 15, n_max: 8 };
        let report = monotonicity_scan(&c);
        assert!(report.checked > 10);
        assert!(report.embdim3_checked > 0);
        assert_eq!(report.violations, vec![]);
    }

    #[test]
    fn first_decrease_detects_drops() {
        assert_eq!(first_decrease(&[1, 3, 4, 5, 5, 6]), None);
        assert_eq!(first_decrease(&[1, 3, 2, 4]), Some(1));
    }
}
