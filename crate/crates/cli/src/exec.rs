//! Command execution: dispatch compiled commands to the library, map
//! library outcomes onto verdicts, and assemble the report.
//! - commands run in declaration order; results never depend on timing
//! - precision limits (window too short, truncation disagreement) become
//!   `inconclusive`, definitive counterexamples become `refuted`
//! - anything validation should have caught maps to `error`, never to a
//!   silently weakened verdict

use gradus_core::graded::{graded_hf, regular_sequence_test, socle_witness, verify_assoc_graded, GradedError};
use gradus_core::local::{hilbert_function, monotonicity_report, LocalError, ModulePresentation};
use gradus_core::operators::{
    base_change_operators, ext_action, finite_generation_window, lift_complex, parameter_search,
    solve_operators, strict_reduction, CoefficientMatrix, OperatorError, OperatorFamily,
};
use gradus_core::resolution::{
    betti_table, complexity_estimate, mf_resolution, mf_verify, resolve, FreeComplex,
    ResolutionError,
};
use gradus_core::semigroup::{
    monotonicity_scan, semigroup_closure, semigroup_hf, verify_presentation, PresentationVerdict,
    SemigroupError,
};
use gradus_core::series::RingSpec;
use gradus_core::{FieldSpec, GradedVerdict, Poly, RegSeqVerdict, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::job::{AlphaSpec, CompiledCommand, CompiledJob};
use crate::report::{AnnotatedVector, CommandResult, NamedMatrix, Report, Verdict};

/// Execute every command in order and aggregate the verdicts.
pub fn run(job: &CompiledJob) -> Report {
    Report::assemble(job.commands.iter().map(|c| execute(job, c)).collect())
}

fn done(command: &str, target: &str, verdict: Verdict, detail: String) -> CommandResult {
    CommandResult {
        command: command.to_string(),
        target: target.to_string(),
        verdict,
        detail,
        vectors: Vec::new(),
        matrices: Vec::new(),
    }
}

fn local_outcome(e: &LocalError) -> Verdict {
    match e {
        LocalError::PrecisionExceeded { .. } => Verdict::Inconclusive,
        _ => Verdict::Error,
    }
}

fn resolution_outcome(e: &ResolutionError) -> Verdict {
    match e {
        ResolutionError::PrecisionUnstable { .. } | ResolutionError::WindowTooShort { .. } => {
            Verdict::Inconclusive
        }
        ResolutionError::NotAFactorization { .. } => Verdict::Refuted,
        ResolutionError::Local(inner) => local_outcome(inner),
        ResolutionError::Shape | ResolutionError::Ring(_) => Verdict::Error,
    }
}

fn operator_outcome(e: &OperatorError) -> Verdict {
    match e {
        OperatorError::WindowTooShort { .. } => Verdict::Inconclusive,
        OperatorError::NotInIdeal { .. }
        | OperatorError::NotInvertible
        | OperatorError::NotMinimal
        | OperatorError::NotDimensionOne { .. }
        | OperatorError::SearchExhausted
        | OperatorError::NotStrict { .. } => Verdict::Refuted,
        OperatorError::Local(inner) => local_outcome(inner),
        OperatorError::Resolution(inner) => resolution_outcome(inner),
        OperatorError::Graded(_) | OperatorError::Field(_) | OperatorError::Ring(_)
        | OperatorError::Shape => Verdict::Error,
    }
}

fn semigroup_outcome(e: &SemigroupError) -> Verdict {
    match e {
        SemigroupError::Local(inner) => local_outcome(inner),
        _ => Verdict::Error,
    }
}

fn poly_grid(label: impl Into<String>, m: &[Vec<Poly>], vars: &[String]) -> NamedMatrix {
    NamedMatrix {
        label: label.into(),
        entries: m.iter().map(|row| row.iter().map(|e| e.render(vars)).collect()).collect(),
    }
}

fn scalar_row(label: impl Into<String>, row: &[Scalar]) -> NamedMatrix {
    NamedMatrix {
        label: label.into(),
        entries: vec![row.iter().map(|s| s.render()).collect()],
    }
}

const TRUNC_NOTE: &str = "beyond the exact window at this truncation";
const AGREE_NOTE: &str = "not yet confirmed by the higher-truncation rerun";

/// Resolve, lift, and solve operators for a module; shared by the eis
/// family. Failure already carries the right verdict.
fn operator_pipeline(
    m: &ModulePresentation,
    window: usize,
) -> Result<(FreeComplex, OperatorFamily), (Verdict, String)> {
    let res = resolve(m, window)
        .map_err(|e| (resolution_outcome(&e), format!("resolution: {e}")))?;
    let family = solve_operators(&lift_complex(&res.complex))
        .map_err(|e| (operator_outcome(&e), format!("operators: {e}")))?;
    Ok((res.complex, family))
}

fn random_invertible(ring: &RingSpec, size: usize, seed: u64) -> Option<CoefficientMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |field: FieldSpec| -> Scalar {
        match field {
            FieldSpec::Rationals => field.from_i64(rng.gen_range(-4i64..=4)),
            FieldSpec::PrimeField(p) => field.from_i64(rng.gen_range(0..p as i64)),
        }
    };
    for _ in 0..10_000 {
        let rows: Vec<Vec<Scalar>> =
            (0..size).map(|_| (0..size).map(|_| draw(ring.field)).collect()).collect();
        if let Ok(m) = CoefficientMatrix::scalar(ring.clone(), rows) {
            return Some(m);
        }
    }
    None
}

fn execute(job: &CompiledJob, cmd: &CompiledCommand) -> CommandResult {
    match cmd {
        CompiledCommand::HfLocal { module, window } => {
            let m = &job.modules[module];
            match hilbert_function(m, *window) {
                Ok(h) => {
                    let mono = monotonicity_report(&h);
                    let detail = match mono.first_violation {
                        None => format!("non-decreasing through n = {}", h.valid_to),
                        Some(n) => format!("first decrease at n = {n}"),
                    };
                    let mut r = done("hf-local", module, Verdict::Computed, detail);
                    r.vectors.push(AnnotatedVector::windowed("H", h.values, h.valid_to, TRUNC_NOTE));
                    r
                }
                Err(e) => done("hf-local", module, local_outcome(&e), e.to_string()),
            }
        }

        CompiledCommand::HfSemigroup { semigroup, window } => {
            let gens = &job.semigroups[semigroup];
            match (semigroup_closure(gens), semigroup_hf(gens, *window)) {
                (Ok(s), Ok(h)) => {
                    let detail = format!(
                        "multiplicity {}, embedding dimension {}, Frobenius number {}; exact at every listed degree",
                        s.multiplicity(),
                        s.embdim(),
                        s.frobenius
                    );
                    let mut r = done("hf-semigroup", semigroup, Verdict::Computed, detail);
                    r.vectors.push(AnnotatedVector::certified("H", h.values));
                    r
                }
                (Err(e), _) | (_, Err(e)) => {
                    done("hf-semigroup", semigroup, semigroup_outcome(&e), e.to_string())
                }
            }
        }

        CompiledCommand::GrVerify { graded, window } => {
            let g = &job.graded[graded];
            let q = job.quotient.as_ref().expect("validated at compile time");
            match verify_assoc_graded(q, g, *window) {
                Ok(GradedVerdict::Verified) => {
                    let detail = format!(
                        "every generator is an initial form of an ideal element and the Hilbert functions agree through n = {window}"
                    );
                    let mut r = done("gr-verify", graded, Verdict::Verified, detail);
                    r.vectors.push(AnnotatedVector::certified("graded H", graded_hf(g, *window).values));
                    r
                }
                Ok(GradedVerdict::Refuted { degree }) => done(
                    "gr-verify",
                    graded,
                    Verdict::Refuted,
                    format!("candidate disagrees with the filtration first at degree {degree}"),
                ),
                Err(e) => match &e {
                    GradedError::Local(inner) => {
                        done("gr-verify", graded, local_outcome(inner), e.to_string())
                    }
                    _ => done("gr-verify", graded, Verdict::Error, e.to_string()),
                },
            }
        }

        CompiledCommand::GrSocle { graded, window } => {
            let g = &job.graded[graded];
            match socle_witness(g, *window) {
                Some(cert) => {
                    let all = cert.checks.iter().all(|(_, ok)| *ok);
                    let names: Vec<&str> =
                        cert.checks.iter().map(|(v, _)| v.as_str()).collect();
                    let detail = format!(
                        "socle witness {} in degree {}; annihilation by {} checked exactly",
                        cert.element.render(&g.vars),
                        cert.degree,
                        names.join(", ")
                    );
                    let verdict = if all { Verdict::Verified } else { Verdict::Refuted };
                    done("gr-socle", graded, verdict, detail)
                }
                None => done(
                    "gr-socle",
                    graded,
                    Verdict::Computed,
                    format!("no socle witness through degree {window}; depth zero is not certified either way"),
                ),
            }
        }

        CompiledCommand::GrRegseq { sources, forms, window } => {
            let target = sources.join(", ");
            let r = job.ring.as_ref().expect("validated at compile time");
            match regular_sequence_test(&r.vars, job.field, forms, *window) {
                Ok(RegSeqVerdict::RegularCertified) => done(
                    "gr-regseq",
                    &target,
                    Verdict::Verified,
                    "Hilbert series matches the complete-intersection product through the socle bound: regular sequence".into(),
                ),
                Ok(RegSeqVerdict::NotRegular { degree }) => done(
                    "gr-regseq",
                    &target,
                    Verdict::Refuted,
                    format!("Hilbert series exceeds the complete-intersection bound at degree {degree}: not a regular sequence"),
                ),
                Ok(RegSeqVerdict::Inconclusive) => done(
                    "gr-regseq",
                    &target,
                    Verdict::Inconclusive,
                    format!("window {window} stops short of the socle bound"),
                ),
                Err(e) => done("gr-regseq", &target, Verdict::Error, e.to_string()),
            }
        }

        CompiledCommand::MfCheck { factorization } => {
            let mf = &job.factorizations[factorization];
            match mf_verify(mf) {
                Ok(()) => done(
                    "mf-check",
                    factorization,
                    Verdict::Verified,
                    "both products equal f times the identity, checked exactly".into(),
                ),
                Err(e) => done("mf-check", factorization, resolution_outcome(&e), e.to_string()),
            }
        }

        CompiledCommand::MfResolve { factorization, window } => {
            let mf = &job.factorizations[factorization];
            match mf_resolution(mf, *window) {
                Ok(complex) => {
                    let mut r = done(
                        "mf-resolve",
                        factorization,
                        Verdict::Verified,
                        "differentials alternate between the two factors; every composite vanishes in the quotient".into(),
                    );
                    r.vectors.push(AnnotatedVector::certified("rank", complex.ranks.clone()));
                    r.matrices.push(poly_grid("phi", &mf.phi, &mf.ring.vars));
                    r.matrices.push(poly_grid("psi", &mf.psi, &mf.ring.vars));
                    r
                }
                Err(e) => done("mf-resolve", factorization, resolution_outcome(&e), e.to_string()),
            }
        }

        CompiledCommand::Betti { module, window } => {
            let m = &job.modules[module];
            match betti_table(m, *window) {
                Ok(bt) => {
                    let detail = format!(
                        "runs at truncations {} and {} agree through homological degree {}",
                        bt.truncs.0, bt.truncs.1, bt.certified_to
                    );
                    let mut r = done("betti", module, Verdict::Computed, detail);
                    r.vectors.push(AnnotatedVector::windowed(
                        "betti",
                        bt.betti,
                        bt.certified_to,
                        AGREE_NOTE,
                    ));
                    r
                }
                Err(e) => done("betti", module, resolution_outcome(&e), e.to_string()),
            }
        }

        CompiledCommand::Cx { module, window } => {
            let m = &job.modules[module];
            let outcome = betti_table(m, *window).and_then(|bt| {
                let cx = complexity_estimate(&bt)?;
                Ok((bt, cx))
            });
            match outcome {
                Ok((bt, cx)) => {
                    let detail = format!(
                        "complexity evidence {} on the certified window; betti numbers {}",
                        cx.cx_upper_evidence,
                        if cx.bounded { "bounded" } else { "unbounded so far" }
                    );
                    let mut r = done("cx", module, Verdict::Computed, detail);
                    r.vectors.push(AnnotatedVector::windowed(
                        "betti",
                        bt.betti,
                        bt.certified_to,
                        AGREE_NOTE,
                    ));
                    r
                }
                Err(e) => done("cx", module, resolution_outcome(&e), e.to_string()),
            }
        }

        CompiledCommand::EisLift { module, window } => {
            let m = &job.modules[module];
            match resolve(m, *window) {
                Ok(res) => {
                    let lifted = lift_complex(&res.complex);
                    let vars = &lifted.over.ring.vars;
                    let mut r = done(
                        "eis-lift",
                        module,
                        Verdict::Computed,
                        "entries replaced by canonical representatives; composites land in the relation ideal".into(),
                    );
                    for (i, d) in lifted.diffs.iter().enumerate() {
                        r.matrices.push(poly_grid(format!("lifted d{}", i + 1), d, vars));
                    }
                    r
                }
                Err(e) => done("eis-lift", module, resolution_outcome(&e), e.to_string()),
            }
        }

        CompiledCommand::EisOps { module, window } => {
            let m = &job.modules[module];
            match operator_pipeline(m, *window) {
                Ok((_, family)) => {
                    let vars = &family.lifted.over.ring.vars;
                    let mut r = done(
                        "eis-ops",
                        module,
                        Verdict::Verified,
                        "relation-weighted operator sum reproduces every composite differential, checked exactly".into(),
                    );
                    for (j, per_index) in family.ops.iter().enumerate() {
                        for (i, t) in per_index.iter().enumerate() {
                            r.matrices.push(poly_grid(format!("t{}[{}]", j + 1, i), t, vars));
                        }
                    }
                    r
                }
                Err((verdict, detail)) => done("eis-ops", module, verdict, detail),
            }
        }

        CompiledCommand::EisBasechange { module, window, alpha } => {
            let m = &job.modules[module];
            let (_, family) = match operator_pipeline(m, *window) {
                Ok(pair) => pair,
                Err((verdict, detail)) => return done("eis-basechange", module, verdict, detail),
            };
            let ring = &family.lifted.over.ring;
            let alpha = match alpha {
                AlphaSpec::Entries(mtx) => mtx.clone(),
                AlphaSpec::Seeded(seed) => {
                    match random_invertible(ring, family.lifted.over.relations.len(), *seed) {
                        Some(mtx) => mtx,
                        None => {
                            return done(
                                "eis-basechange",
                                module,
                                Verdict::Error,
                                "failed to sample an invertible matrix".into(),
                            )
                        }
                    }
                }
            };
            match base_change_operators(&alpha, &family) {
                Ok(changed) => {
                    let vars = &ring.vars;
                    let rels: Vec<String> = changed
                        .lifted
                        .over
                        .relations
                        .iter()
                        .map(|g| g.render(vars))
                        .collect();
                    let detail = format!(
                        "transformed relations ({}); defining identity re-verified in the new frame",
                        rels.join("; ")
                    );
                    let mut r = done("eis-basechange", module, Verdict::Verified, detail);
                    r.matrices.push(poly_grid("alpha", &alpha.entries, vars));
                    for (j, per_index) in changed.ops.iter().enumerate() {
                        for (i, t) in per_index.iter().enumerate() {
                            r.matrices.push(poly_grid(format!("t'{}[{}]", j + 1, i), t, vars));
                        }
                    }
                    r
                }
                Err(e) => done("eis-basechange", module, operator_outcome(&e), e.to_string()),
            }
        }

        CompiledCommand::EisExt { module, window } => {
            let m = &job.modules[module];
            let (complex, family) = match operator_pipeline(m, *window) {
                Ok(pair) => pair,
                Err((verdict, detail)) => return done("eis-ext", module, verdict, detail),
            };
            match ext_action(&complex, &family) {
                Ok(ext) => {
                    let mut detail =
                        String::from("reduced operator matrices commute pairwise, checked exactly");
                    let mut r = done("eis-ext", module, Verdict::Verified, String::new());
                    r.vectors.push(AnnotatedVector::certified("dim Ext", ext.betti.clone()));
                    match finite_generation_window(&ext, ext.betti.len()) {
                        Ok(fg) => {
                            detail.push_str(&format!(
                                "; generator counts {} over the operator images",
                                if fg.stabilized { "stabilize" } else { "do not yet stabilize" }
                            ));
                            r.vectors.push(AnnotatedVector::windowed(
                                "new generators",
                                fg.new_generators,
                                ext.betti.len().saturating_sub(1),
                                "window evidence only",
                            ));
                        }
                        Err(e) => detail.push_str(&format!("; finite generation: {e}")),
                    }
                    for (j, per_index) in ext.action.iter().enumerate() {
                        for (i, t) in per_index.iter().enumerate() {
                            let rows: Vec<Vec<String>> = (0..t.rows)
                                .map(|a| (0..t.cols).map(|b| t.get(a, b).render()).collect())
                                .collect();
                            r.matrices.push(NamedMatrix {
                                label: format!("T{}[{}]", j + 1, i),
                                entries: rows,
                            });
                        }
                    }
                    r.detail = detail;
                    r
                }
                Err(e) => done("eis-ext", module, operator_outcome(&e), e.to_string()),
            }
        }

        CompiledCommand::EisParam { module, window } => {
            let m = &job.modules[module];
            let (complex, family) = match operator_pipeline(m, *window) {
                Ok(pair) => pair,
                Err((verdict, detail)) => return done("eis-param", module, verdict, detail),
            };
            let param = ext_action(&complex, &family).and_then(|ext| parameter_search(&ext));
            match param {
                Ok(xi) => {
                    let mut r = done(
                        "eis-param",
                        module,
                        Verdict::Verified,
                        "coefficient tuple acts bijectively at every testable degree in the window".into(),
                    );
                    r.matrices.push(scalar_row("parameter coefficients", &xi.coeffs));
                    r
                }
                Err(e) => done("eis-param", module, operator_outcome(&e), e.to_string()),
            }
        }

        CompiledCommand::ReduceStrict { module, window } => {
            let m = &job.modules[module];
            let (complex, family) = match operator_pipeline(m, *window) {
                Ok(pair) => pair,
                Err((verdict, detail)) => return done("reduce-strict", module, verdict, detail),
            };
            let reduced = ext_action(&complex, &family)
                .and_then(|ext| Ok((parameter_search(&ext)?, ext)))
                .and_then(|(xi, ext)| strict_reduction(m, &ext, &xi));
            match reduced {
                Ok(sr) => {
                    let rep = &sr.report;
                    let ok = rep.round_trip
                        && rep.tail_regular
                        && rep.second_syzygy_vanishes
                        && rep.dim_ok;
                    let vars = &m.over.ring.vars;
                    let detail = format!(
                        "hypersurface carrier {}; change of basis round-trips: {}; tail initial forms regular: {}; second syzygy vanishes at truncations {} and {} (window top {}): {}; dim P = {} as required: {}",
                        sr.gens[0].render(vars),
                        rep.round_trip,
                        rep.tail_regular,
                        rep.truncs.0,
                        rep.truncs.1,
                        rep.syzygy_window_top,
                        rep.second_syzygy_vanishes,
                        rep.dim_p,
                        rep.dim_ok
                    );
                    let verdict = if ok { Verdict::Verified } else { Verdict::Refuted };
                    let mut r = done("reduce-strict", module, verdict, detail);
                    let col = |ps: &[Poly]| -> Vec<Vec<String>> {
                        ps.iter().map(|p| vec![p.render(vars)]).collect()
                    };
                    r.matrices.push(NamedMatrix {
                        label: "rebased relations".into(),
                        entries: col(&sr.gens),
                    });
                    r.matrices.push(NamedMatrix {
                        label: "initial forms".into(),
                        entries: col(&sr.gen_initials),
                    });
                    r.matrices.push(poly_grid("alpha", &sr.alpha.entries, vars));
                    r
                }
                Err(e) => done("reduce-strict", module, operator_outcome(&e), e.to_string()),
            }
        }

        CompiledCommand::ScanSemigroups { constraints } => {
            let report = monotonicity_scan(constraints);
            let target = format!(
                "embdim <= {}, mult <= {}, frobenius <= {}",
                constraints.max_embdim, constraints.max_mult, constraints.max_frobenius
            );
            let verdict =
                if report.violations.is_empty() { Verdict::Verified } else { Verdict::Refuted };
            let detail = format!(
                "checked {} semigroups ({} with embedding dimension three); {} monotonicity violations",
                report.checked,
                report.embdim3_checked,
                report.violations.len()
            );
            let mut r = done("scan-semigroups", &target, verdict, detail);
            for v in report.violations.iter().take(16) {
                let gens: Vec<String> = v.generators.iter().map(|a| a.to_string()).collect();
                r.vectors.push(AnnotatedVector::certified(
                    format!("H for <{}> (first decrease at n = {})", gens.join(","), v.degree),
                    v.values.clone(),
                ));
            }
            r
        }

        CompiledCommand::VerifyPresentation { semigroup, window } => {
            let gens = &job.semigroups[semigroup];
            let q = job.quotient.as_ref().expect("validated at compile time");
            match verify_presentation(gens, q, *window) {
                Ok(PresentationVerdict::Verified) => {
                    let detail = format!(
                        "every relation vanishes under the exponent substitution and the Hilbert functions agree through n = {window}"
                    );
                    let mut r = done("verify-presentation", semigroup, Verdict::Verified, detail);
                    if let Ok(h) = semigroup_hf(gens, *window) {
                        r.vectors.push(AnnotatedVector::certified("semigroup H", h.values));
                    }
                    if let Ok(h) =
                        hilbert_function(&ModulePresentation::cyclic(q.clone()), *window)
                    {
                        r.vectors.push(AnnotatedVector::windowed(
                            "filtration H",
                            h.values,
                            h.valid_to,
                            TRUNC_NOTE,
                        ));
                    }
                    r
                }
                Ok(PresentationVerdict::RelationFails { index }) => done(
                    "verify-presentation",
                    semigroup,
                    Verdict::Refuted,
                    format!("relation {index} does not vanish under the exponent substitution"),
                ),
                Ok(PresentationVerdict::HilbertMismatch { degree }) => done(
                    "verify-presentation",
                    semigroup,
                    Verdict::Refuted,
                    format!("Hilbert functions first disagree at n = {degree}"),
                ),
                Err(e) => {
                    done("verify-presentation", semigroup, semigroup_outcome(&e), e.to_string())
                }
            }
        }
    }
}
