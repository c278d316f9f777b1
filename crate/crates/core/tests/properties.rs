//! Property suite: the structural invariants each module promises, driven
//! by randomized instances. Case counts are tuned per test so the heavy
//! homological properties stay within a desk-scale budget.

use proptest::prelude::*;

use gradus_core::graded::{graded_hf, regular_sequence_test, GradedQuotient};
use gradus_core::local::{hilbert_function, ModulePresentation, QuotientPresentation};
use gradus_core::matrix::ExactMatrix;
use gradus_core::monomial::Monomial;
use gradus_core::operators::{
    base_change_operators, lift_complex, solve_operators, CoefficientMatrix,
};
use gradus_core::resolution::{betti_table, mf_resolution, resolve, MatrixFactorization};
use gradus_core::semigroup::{semigroup_closure, semigroup_hf, sumset_filtration};
use gradus_core::series::RingSpec;
use gradus_core::{FieldSpec, Poly, Scalar};

const Q: FieldSpec = FieldSpec::Rationals;
const P: FieldSpec = FieldSpec::PrimeField(32003);

fn names(vs: &[&str]) -> Vec<String> {
    vs.iter().map(|s| s.to_string()).collect()
}

fn ring(vs: &[&str], trunc: usize, field: FieldSpec) -> RingSpec {
    RingSpec::new(names(vs), trunc, field).unwrap()
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// Generator tuples with gcd one, enough spread to hit pairs and triples.
fn semigroup_gens() -> impl Strategy<Value = Vec<u64>> {
    proptest::collection::vec(2u64..=13, 2..=3)
        .prop_filter("gcd one", |g| g.iter().copied().fold(0, gcd) == 1)
}

/// Monomials of degree 2..6 in two variables, as exponent pairs; at most
/// two so the local engine's complete-intersection shape check accepts them,
/// and degree under the truncation windows used below so none collapses.
fn monomial_ideal_2v() -> impl Strategy<Value = Vec<(u32, u32)>> {
    proptest::collection::vec((0u32..=3, 0u32..=3), 1..=2)
        .prop_map(|v| {
            v.into_iter()
                .map(|(a, b)| if a + b < 2 { (a + 2, b) } else { (a, b) })
                .collect::<Vec<_>>()
        })
}

fn monomial_poly(field: FieldSpec, exps: &[u32]) -> Poly {
    Poly::monomial(Monomial(exps.to_vec()), field.one())
}

/// Random small scalar matrix, filtered invertible by the caller.
fn scalar_mat_2x2() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (-3i64..=3, -3i64..=3, -3i64..=3, -3i64..=3)
        .prop_filter("invertible", |(a, b, c, d)| a * d - b * c != 0)
        .prop_map(|(a, b, c, d)| vec![vec![a, b], vec![c, d]])
}

/// The factorization corpus at an arbitrary truncation.
fn corpus_at(trunc: usize) -> Vec<MatrixFactorization> {
    let r = ring(&["x", "y"], trunc, Q);
    let pp = |s: &str| r.parse(s).unwrap();
    let mat = |rows: &[&[&str]]| -> Vec<Vec<Poly>> {
        rows.iter().map(|row| row.iter().map(|e| pp(e)).collect()).collect()
    };
    vec![
        MatrixFactorization::new(r.clone(), pp("x*y"), mat(&[&["x"]]), mat(&[&["y"]])).unwrap(),
        MatrixFactorization::new(r.clone(), pp("y^3"), mat(&[&["y"]]), mat(&[&["y^2"]])).unwrap(),
        MatrixFactorization::new(
            r.clone(),
            pp("x^2 - y^3"),
            mat(&[&["x", "y^2"], &["y", "x"]]),
            mat(&[&["x", "-y^2"], &["-y", "x"]]),
        )
        .unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // exact linear algebra: rank plus nullity is the column count, and
    // kernel vectors actually annihilate
    #[test]
    fn rank_nullity_and_kernel_annihilation(
        entries in proptest::collection::vec(-5i64..=5, 12),
        rows in 2usize..=4,
    ) {
        let cols = 12 / rows;
        let data: Vec<Vec<Scalar>> = (0..rows)
            .map(|i| (0..cols).map(|j| P.from_i64(entries[i * cols + j])).collect())
            .collect();
        let m = ExactMatrix::from_rows(P, data);
        let kernel = m.kernel_basis();
        prop_assert_eq!(m.rank() + kernel.len(), cols);
        for v in &kernel {
            for i in 0..rows {
                let mut acc = P.zero();
                for (j, c) in v.iter().enumerate() {
                    acc = acc.add(&m.get(i, j).mul(c));
                }
                prop_assert!(acc.is_zero());
            }
        }
    }

    // Hilbert functions of binomial quotients do not depend on the field,
    // because every structure constant is a sign
    #[test]
    fn hilbert_function_is_field_independent_on_binomials(
        (a, b) in (2u64..=5, 2u64..=6).prop_filter("coprime", |(a, b)| gcd(*a, *b) == 1),
    ) {
        let rel = format!("X^{b} - Y^{a}");
        let mut values = Vec::new();
        for field in [Q, P, FieldSpec::PrimeField(7)] {
            let r = ring(&["X", "Y"], 10, field);
            let q = QuotientPresentation::new(r.clone(), vec![r.parse(&rel).unwrap()]).unwrap();
            let hf = hilbert_function(&ModulePresentation::cyclic(q), 6).unwrap();
            values.push(hf.values);
        }
        prop_assert_eq!(&values[0], &values[1]);
        prop_assert_eq!(&values[1], &values[2]);
    }

    // truncation stability: windows at D and D+2 agree where both are valid
    #[test]
    fn hilbert_function_agrees_across_truncations(
        (a, b) in (2u64..=5, 2u64..=6).prop_filter("coprime", |(a, b)| gcd(*a, *b) == 1),
        d in 8usize..=12,
    ) {
        let rel = format!("X^{b} - Y^{a}");
        let lo_ring = ring(&["X", "Y"], d, Q);
        let q = QuotientPresentation::new(lo_ring.clone(), vec![lo_ring.parse(&rel).unwrap()]).unwrap();
        let lo = hilbert_function(&ModulePresentation::cyclic(q.clone()), d - 2).unwrap();
        let hi = hilbert_function(&ModulePresentation::cyclic(q.with_trunc(d + 2)), d - 2).unwrap();
        prop_assert_eq!(lo.values, hi.values);
    }

    // the first two Hilbert values are forced: length one in degree zero,
    // embedding dimension in degree one
    #[test]
    fn hilbert_function_starts_at_one_and_embdim(exps in monomial_ideal_2v()) {
        let r = ring(&["X", "Y"], 8, Q);
        let gens: Vec<Poly> = exps.iter().map(|&(a, b)| monomial_poly(Q, &[a, b])).collect();
        let q = QuotientPresentation::new(r, gens).unwrap();
        let hf = hilbert_function(&ModulePresentation::cyclic(q.clone()), 4).unwrap();
        prop_assert_eq!(hf.values[0], 1);
        prop_assert_eq!(hf.values[1], q.embdim);
    }

    // variable order is a notational choice: swapping the two variables in
    // every relation leaves the Hilbert function unchanged
    #[test]
    fn hilbert_function_is_symmetric_under_variable_swap(
        (a, b) in (2u64..=5, 2u64..=6).prop_filter("coprime", |(a, b)| gcd(*a, *b) == 1),
    ) {
        let r = ring(&["X", "Y"], 10, Q);
        let q1 = QuotientPresentation::new(r.clone(), vec![r.parse(&format!("X^{b} - Y^{a}")).unwrap()]).unwrap();
        let q2 = QuotientPresentation::new(r.clone(), vec![r.parse(&format!("Y^{b} - X^{a}")).unwrap()]).unwrap();
        let h1 = hilbert_function(&ModulePresentation::cyclic(q1), 6).unwrap();
        let h2 = hilbert_function(&ModulePresentation::cyclic(q2), 6).unwrap();
        prop_assert_eq!(h1.values, h2.values);
    }

    // graded Hilbert functions ignore generator order and redundant
    // generators already inside the ideal
    #[test]
    fn graded_hf_ignores_order_and_redundancy(exps in monomial_ideal_2v(), rot in 0usize..3) {
        let vars = names(&["X", "Y"]);
        let gens: Vec<Poly> = exps.iter().map(|&(a, b)| monomial_poly(Q, &[a, b])).collect();
        let base = GradedQuotient::new(vars.clone(), Q, gens.clone()).unwrap();
        let mut shuffled = gens.clone();
        let len = shuffled.len().max(1);
        shuffled.rotate_left(rot % len);
        // a product of two generators is redundant by construction
        let redundant = gens[0].mul(gens.last().unwrap());
        shuffled.push(redundant);
        let padded = GradedQuotient::new(vars, Q, shuffled).unwrap();
        prop_assert_eq!(graded_hf(&base, 8).values, graded_hf(&padded, 8).values);
    }

    // for homogeneous relations the local filtration is already graded, so
    // the two Hilbert function engines must agree exactly
    #[test]
    fn graded_and_local_hilbert_functions_agree_on_monomial_ideals(exps in monomial_ideal_2v()) {
        let vars = names(&["X", "Y"]);
        let gens: Vec<Poly> = exps.iter().map(|&(a, b)| monomial_poly(Q, &[a, b])).collect();
        let graded = GradedQuotient::new(vars, Q, gens.clone()).unwrap();
        let g = graded_hf(&graded, 6);
        let r = ring(&["X", "Y"], 10, Q);
        let q = QuotientPresentation::new(r, gens).unwrap();
        let l = hilbert_function(&ModulePresentation::cyclic(q), 6).unwrap();
        prop_assert_eq!(g.values, l.values);
    }

    // regular sequence verdicts ignore the order of the forms
    #[test]
    fn regular_sequence_verdict_is_permutation_invariant(
        (a, b) in (2usize..=3, 2usize..=4),
        swap in proptest::bool::ANY,
    ) {
        let vars = names(&["X", "Y", "Z"]);
        let f1 = monomial_poly(Q, &[a as u32, 0, 0]);
        let f2 = monomial_poly(Q, &[0, b as u32, 0]);
        let check_to = a + b - 1;
        let forward = regular_sequence_test(&vars, Q, &[f1.clone(), f2.clone()], check_to).unwrap();
        let gens = if swap { [f2, f1] } else { [f1, f2] };
        let either = regular_sequence_test(&vars, Q, &gens, check_to).unwrap();
        prop_assert_eq!(forward, either);
    }

    // sumset filtration is a descending chain and its differences rebuild
    // the semigroup Hilbert function
    #[test]
    fn filtration_is_nested_and_rebuilds_hf(gens in semigroup_gens()) {
        let filt = sumset_filtration(&gens, 6).unwrap();
        for n in 0..filt.sets.len() - 1 {
            for x in &filt.sets[n + 1] {
                prop_assert!(filt.sets[n].binary_search(x).is_ok(), "S_{} not inside S_{}", n + 1, n);
            }
        }
        let hf = semigroup_hf(&gens, 6).unwrap();
        for n in 0..=6 {
            prop_assert_eq!(hf.values[n], filt.difference(n).len());
        }
    }

    // closure is idempotent, the Frobenius number is the largest gap, and
    // membership matches the gap list
    #[test]
    fn closure_is_idempotent_and_consistent(gens in semigroup_gens()) {
        let s = semigroup_closure(&gens).unwrap();
        let again = semigroup_closure(&s.generators).unwrap();
        prop_assert_eq!(&again.generators, &s.generators);
        prop_assert!(!again.normalized, "minimal generators must not be flagged redundant");
        match s.gaps.last() {
            Some(&g) => prop_assert_eq!(s.frobenius, g as i64),
            None => prop_assert_eq!(s.frobenius, -1),
        }
        for x in 0..=(s.frobenius.max(0) as u64 + 2) {
            prop_assert_eq!(s.contains(x), s.gaps.binary_search(&x).is_err());
        }
        // degree one of the Hilbert function counts the minimal generators
        let hf = semigroup_hf(&gens, 3).unwrap();
        prop_assert_eq!(hf.values[0], 1);
        prop_assert_eq!(hf.values[1], s.embdim());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    // Betti tables of factorization cokernels certify at every reasonable
    // truncation and stay two-periodic on the certified window
    #[test]
    fn betti_certification_is_truncation_stable(d in 10usize..=14, pick in 0usize..3) {
        let factor = corpus_at(d).swap_remove(pick);
        let m = factor.module().unwrap();
        let bt = betti_table(&m, 6).unwrap();
        prop_assert!(bt.certified_to >= 2);
        for i in 0..bt.certified_to.saturating_sub(1) {
            prop_assert_eq!(bt.betti[i], bt.betti[i + 2]);
        }
    }

    // the defining operator identity holds at every truncation the corpus
    // can be solved at; the constructor asserts it internally
    #[test]
    fn operator_identity_holds_across_truncations(d in 10usize..=14, pick in 0usize..3, steps in 4usize..=6) {
        let factor = corpus_at(d).swap_remove(pick);
        let complex = mf_resolution(&factor, steps).unwrap();
        let family = solve_operators(&lift_complex(&complex)).unwrap();
        family.assert_defining_identity();
        prop_assert_eq!(family.nops(), steps - 1);
    }

    // base change along alpha then alpha inverse is the identity on both
    // the relations and the operators
    #[test]
    fn base_change_round_trips_through_the_inverse(mat in scalar_mat_2x2()) {
        let r = ring(&["x", "y", "z"], 8, Q);
        let a = QuotientPresentation::new(
            r.clone(),
            vec![r.parse("x^2").unwrap(), r.parse("y^2").unwrap()],
        )
        .unwrap();
        let m = ModulePresentation::new(a, 1, vec![vec![r.parse("x").unwrap()]]).unwrap();
        let res = resolve(&m, 4).unwrap();
        let family = solve_operators(&lift_complex(&res.complex)).unwrap();

        let to_scalar = |rows: &[Vec<i64>]| -> Vec<Vec<Scalar>> {
            rows.iter().map(|row| row.iter().map(|&e| Q.from_i64(e)).collect()).collect()
        };
        let alpha = CoefficientMatrix::scalar(r.clone(), to_scalar(&mat)).unwrap();
        let inv_polys = alpha.inverse();
        let alpha_inv = CoefficientMatrix::new(r.clone(), inv_polys).unwrap();
        let once = base_change_operators(&alpha, &family).unwrap();
        let back = base_change_operators(&alpha_inv, &once).unwrap();
        prop_assert_eq!(back.ops, family.ops);
        prop_assert_eq!(back.lifted.over.relations, family.lifted.over.relations);
    }
}
