//! Job files: one JSON document declaring a field, an ambient ring, named
//! inputs, and an ordered command list.
//! - parsing is all or nothing: every expression, reference, and shape is
//!   resolved before anything executes
//! - malformed JSON fails with serde's line/column diagnostics; expression
//!   errors carry the offending source string and column
//! - command-line overrides (field, truncation, window, seed) rewrite the
//!   job before compilation, so a rerun with the same flags is identical

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use gradus_core::expr::parse_poly;
use gradus_core::local::{ModulePresentation, QuotientPresentation};
use gradus_core::operators::CoefficientMatrix;
use gradus_core::resolution::MatrixFactorization;
use gradus_core::semigroup::{semigroup_closure, ScanConstraints};
use gradus_core::series::RingSpec;
use gradus_core::{FieldSpec, GradedQuotient, Poly};

/// Anything that prevents a job from compiling; always an input error.
#[derive(Debug, Error)]
pub enum JobError {
    #[error("json: {0}")]
    Json(String),
    #[error("field spec '{0}': expected 'q' or 'fp:<prime>'")]
    FieldSpec(String),
    #[error("{section} '{name}': {msg}")]
    Section { section: &'static str, name: String, msg: String },
    #[error("command {index} ({cmd}): {msg}")]
    Command { index: usize, cmd: String, msg: String },
    #[error("{0}")]
    Config(String),
}

/// The on-disk job document. Optional sections default to empty so small
/// jobs stay small; unknown keys are rejected outright.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobFile {
    /// "q" for the rationals, "fp:<p>" for a prime field; default "q"
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ring: Option<RingSection>,
    /// relations cutting the ambient quotient, as expressions
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub relations: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub modules: BTreeMap<String, ModuleSection>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub factorizations: BTreeMap<String, FactorizationSection>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub graded: BTreeMap<String, GradedSection>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub semigroups: BTreeMap<String, Vec<u64>>,
    pub commands: Vec<CommandSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingSection {
    pub vars: Vec<String>,
    pub trunc: usize,
}

/// A module over the job's quotient: `rank` generators, `phi` a row-major
/// relation matrix with `rank` rows; omitted phi means the free module.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleSection {
    pub rank: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub phi: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorizationSection {
    pub f: String,
    pub phi: Vec<Vec<String>>,
    pub psi: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GradedSection {
    pub gens: Vec<String>,
}

/// One requested command. The shape is flat so any command parses; which
/// fields are required is checked per command during compilation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommandSpec {
    pub cmd: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub module: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factorization: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graded: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semigroup: Option<String>,
    /// homogeneous forms for gr-regseq
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forms: Option<Vec<String>>,
    /// degree / step window; falls back to the job-wide default
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    /// explicit base-change matrix entries for eis-basechange
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<Vec<String>>>,
    /// seed for a randomized invertible base change
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_embdim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_mult: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_frobenius: Option<i64>,
}

/// Command-line overrides applied before compilation.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub field: Option<String>,
    pub trunc: Option<usize>,
    pub window: Option<usize>,
    pub seed: Option<u64>,
}

/// Fallback window when neither the command nor the flags give one.
pub const DEFAULT_WINDOW: usize = 8;

/// Parse a job document; serde errors keep their line/column text.
pub fn parse_job(text: &str) -> Result<JobFile, JobError> {
    serde_json::from_str(text).map_err(|e| JobError::Json(e.to_string()))
}

/// Rewrite the job in place with the command-line overrides.
pub fn apply_overrides(job: &mut JobFile, o: &Overrides) {
    if let Some(f) = &o.field {
        job.field = Some(f.clone());
    }
    if let (Some(d), Some(ring)) = (o.trunc, job.ring.as_mut()) {
        ring.trunc = d;
    }
    if let Some(w) = o.window {
        for c in &mut job.commands {
            c.window.get_or_insert(w);
        }
    }
    if let Some(s) = o.seed {
        for c in &mut job.commands {
            if c.cmd == "eis-basechange" && c.alpha.is_none() {
                c.seed.get_or_insert(s);
            }
        }
    }
}

/// The base change requested by eis-basechange: explicit entries or a
/// seeded random invertible scalar matrix.
#[derive(Debug, Clone)]
pub enum AlphaSpec {
    Entries(CoefficientMatrix),
    Seeded(u64),
}

/// A fully resolved command, every reference checked and every expression
/// parsed; executing one can no longer hit an input error.
#[derive(Debug, Clone)]
pub enum CompiledCommand {
    HfLocal { module: String, window: usize },
    HfSemigroup { semigroup: String, window: usize },
    GrVerify { graded: String, window: usize },
    GrSocle { graded: String, window: usize },
    GrRegseq { sources: Vec<String>, forms: Vec<Poly>, window: usize },
    MfCheck { factorization: String },
    MfResolve { factorization: String, window: usize },
    Betti { module: String, window: usize },
    Cx { module: String, window: usize },
    EisLift { module: String, window: usize },
    EisOps { module: String, window: usize },
    EisBasechange { module: String, window: usize, alpha: AlphaSpec },
    EisExt { module: String, window: usize },
    EisParam { module: String, window: usize },
    ReduceStrict { module: String, window: usize },
    ScanSemigroups { constraints: ScanConstraints },
    VerifyPresentation { semigroup: String, window: usize },
}

/// A compiled job: concrete algebra objects plus the resolved commands.
#[derive(Debug, Clone)]
pub struct CompiledJob {
    pub field: FieldSpec,
    pub ring: Option<RingSpec>,
    pub quotient: Option<QuotientPresentation>,
    pub modules: BTreeMap<String, ModulePresentation>,
    pub factorizations: BTreeMap<String, MatrixFactorization>,
    pub graded: BTreeMap<String, GradedQuotient>,
    pub semigroups: BTreeMap<String, Vec<u64>>,
    pub commands: Vec<CompiledCommand>,
}

fn parse_field(spec: &Option<String>) -> Result<FieldSpec, JobError> {
    let s = spec.as_deref().unwrap_or("q");
    if s.eq_ignore_ascii_case("q") {
        return Ok(FieldSpec::Rationals);
    }
    let p = s
        .strip_prefix("fp:")
        .and_then(|rest| rest.parse::<u64>().ok())
        .ok_or_else(|| JobError::FieldSpec(s.to_string()))?;
    FieldSpec::prime_field(p).map_err(|_| JobError::FieldSpec(s.to_string()))
}

fn section_err(section: &'static str, name: &str, msg: impl ToString) -> JobError {
    JobError::Section { section, name: name.to_string(), msg: msg.to_string() }
}

fn parse_matrix(
    section: &'static str,
    name: &str,
    ring: &RingSpec,
    rows: &[Vec<String>],
) -> Result<Vec<Vec<Poly>>, JobError> {
    rows.iter()
        .map(|row| {
            row.iter()
                .map(|src| {
                    parse_poly(src, &ring.vars, ring.field)
                        .map_err(|e| section_err(section, name, format!("'{src}': {e}")))
                })
                .collect()
        })
        .collect()
}

/// Resolve every declaration and command; nothing runs here beyond cheap
/// structural validation (closure of semigroups, matrix invertibility).
pub fn compile(job: &JobFile) -> Result<CompiledJob, JobError> {
    let field = parse_field(&job.field)?;
    let ring = match &job.ring {
        Some(sec) => Some(
            RingSpec::new(sec.vars.clone(), sec.trunc, field)
                .map_err(|e| section_err("ring", "ring", e))?,
        ),
        None => None,
    };

    let need_ring = |what: &'static str| -> Result<&RingSpec, JobError> {
        ring.as_ref().ok_or(JobError::Config(format!("{what} requires a ring section")))
    };

    let quotient = if job.relations.is_empty() && ring.is_none() {
        None
    } else {
        let r = need_ring("a relations list")?;
        let rels: Vec<Poly> = job
            .relations
            .iter()
            .map(|src| {
                parse_poly(src, &r.vars, field)
                    .map_err(|e| section_err("relations", src, e))
            })
            .collect::<Result<_, _>>()?;
        Some(
            QuotientPresentation::new(r.clone(), rels)
                .map_err(|e| section_err("relations", "relations", e))?,
        )
    };

    let mut modules = BTreeMap::new();
    for (name, sec) in &job.modules {
        let q = quotient
            .clone()
            .ok_or_else(|| section_err("module", name, "requires a ring section"))?;
        let phi = if sec.phi.is_empty() {
            vec![Vec::new(); sec.rank]
        } else {
            parse_matrix("module", name, &q.ring, &sec.phi)?
        };
        let m = ModulePresentation::new(q, sec.rank, phi)
            .map_err(|e| section_err("module", name, e))?;
        modules.insert(name.clone(), m);
    }

    let mut factorizations = BTreeMap::new();
    for (name, sec) in &job.factorizations {
        let r = need_ring("a factorization")?;
        let f = parse_poly(&sec.f, &r.vars, field)
            .map_err(|e| section_err("factorization", name, format!("'{}': {e}", sec.f)))?;
        let phi = parse_matrix("factorization", name, r, &sec.phi)?;
        let psi = parse_matrix("factorization", name, r, &sec.psi)?;
        let mf = MatrixFactorization::new(r.clone(), f, phi, psi)
            .map_err(|e| section_err("factorization", name, e))?;
        factorizations.insert(name.clone(), mf);
    }

    let mut graded = BTreeMap::new();
    for (name, sec) in &job.graded {
        let r = need_ring("a graded candidate")?;
        let gens: Vec<Poly> = sec
            .gens
            .iter()
            .map(|src| {
                parse_poly(src, &r.vars, field)
                    .map_err(|e| section_err("graded", name, format!("'{src}': {e}")))
            })
            .collect::<Result<_, _>>()?;
        let g = GradedQuotient::new(r.vars.clone(), field, gens)
            .map_err(|e| section_err("graded", name, e))?;
        graded.insert(name.clone(), g);
    }

    let mut semigroups = BTreeMap::new();
    for (name, gens) in &job.semigroups {
        semigroup_closure(gens).map_err(|e| section_err("semigroup", name, e))?;
        semigroups.insert(name.clone(), gens.clone());
    }

    let mut commands = Vec::new();
    for (index, spec) in job.commands.iter().enumerate() {
        let err = |msg: String| JobError::Command { index, cmd: spec.cmd.clone(), msg };
        let window = spec.window.unwrap_or(DEFAULT_WINDOW);
        let module = || -> Result<String, JobError> {
            let name = spec.module.clone().ok_or_else(|| err("needs a module".into()))?;
            if !modules.contains_key(&name) {
                return Err(err(format!("module '{name}' is not declared")));
            }
            Ok(name)
        };
        let compiled = match spec.cmd.as_str() {
            "hf-local" => CompiledCommand::HfLocal { module: module()?, window },
            "hf-semigroup" | "verify-presentation" => {
                let name =
                    spec.semigroup.clone().ok_or_else(|| err("needs a semigroup".into()))?;
                let gens = semigroups
                    .get(&name)
                    .ok_or_else(|| err(format!("semigroup '{name}' is not declared")))?;
                if spec.cmd == "hf-semigroup" {
                    CompiledCommand::HfSemigroup { semigroup: name, window }
                } else {
                    let q = quotient
                        .as_ref()
                        .ok_or_else(|| err("needs ring relations as the candidate".into()))?;
                    if q.ring.vars.len() != gens.len() {
                        return Err(err(format!(
                            "candidate has {} variables for {} generators",
                            q.ring.vars.len(),
                            gens.len()
                        )));
                    }
                    CompiledCommand::VerifyPresentation { semigroup: name, window }
                }
            }
            "gr-verify" | "gr-socle" => {
                let name = spec.graded.clone().ok_or_else(|| err("needs a graded candidate".into()))?;
                if !graded.contains_key(&name) {
                    return Err(err(format!("graded '{name}' is not declared")));
                }
                if spec.cmd == "gr-verify" {
                    if quotient.is_none() {
                        return Err(err("needs ring relations to compare against".into()));
                    }
                    CompiledCommand::GrVerify { graded: name, window }
                } else {
                    CompiledCommand::GrSocle { graded: name, window }
                }
            }
            "gr-regseq" => {
                let sources = spec.forms.clone().ok_or_else(|| err("needs forms".into()))?;
                if sources.is_empty() {
                    return Err(err("needs at least one form".into()));
                }
                let r = ring.as_ref().ok_or_else(|| err("requires a ring section".into()))?;
                let forms: Vec<Poly> = sources
                    .iter()
                    .map(|src| {
                        parse_poly(src, &r.vars, field).map_err(|e| err(format!("'{src}': {e}")))
                    })
                    .collect::<Result<_, _>>()?;
                CompiledCommand::GrRegseq { sources, forms, window }
            }
            "mf-check" | "mf-resolve" => {
                let name = spec
                    .factorization
                    .clone()
                    .ok_or_else(|| err("needs a factorization".into()))?;
                if !factorizations.contains_key(&name) {
                    return Err(err(format!("factorization '{name}' is not declared")));
                }
                if spec.cmd == "mf-check" {
                    CompiledCommand::MfCheck { factorization: name }
                } else {
                    CompiledCommand::MfResolve { factorization: name, window }
                }
            }
            "betti" => CompiledCommand::Betti { module: module()?, window },
            "cx" => CompiledCommand::Cx { module: module()?, window },
            "eis-lift" => CompiledCommand::EisLift { module: module()?, window },
            "eis-ops" => CompiledCommand::EisOps { module: module()?, window },
            "eis-ext" => CompiledCommand::EisExt { module: module()?, window },
            "eis-param" => CompiledCommand::EisParam { module: module()?, window },
            "reduce-strict" => CompiledCommand::ReduceStrict { module: module()?, window },
            "eis-basechange" => {
                let name = module()?;
                let q = quotient.as_ref().expect("module commands imply a quotient");
                let alpha = match (&spec.alpha, spec.seed) {
                    (Some(_), Some(_)) => {
                        return Err(err("give either alpha entries or a seed, not both".into()))
                    }
                    (Some(rows), None) => {
                        let c = q.relations.len();
                        if rows.len() != c || rows.iter().any(|row| row.len() != c) {
                            return Err(err(format!("alpha must be {c} x {c}")));
                        }
                        let entries = parse_matrix("command", "alpha", &q.ring, rows)?;
                        let m = CoefficientMatrix::new(q.ring.clone(), entries)
                            .map_err(|e| err(e.to_string()))?;
                        AlphaSpec::Entries(m)
                    }
                    (None, Some(seed)) => AlphaSpec::Seeded(seed),
                    (None, None) => {
                        return Err(err("needs alpha entries or a seed".into()))
                    }
                };
                CompiledCommand::EisBasechange { module: name, window, alpha }
            }
            "scan-semigroups" => CompiledCommand::ScanSemigroups {
                constraints: ScanConstraints {
                    max_embdim: spec.max_embdim.unwrap_or(3),
                    max_mult: spec.max_mult.unwrap_or(8),
                    max_frobenius: spec.max_frobenius.unwrap_or(100),
                    n_max: window.max(2),
                },
            },
            other => return Err(err(format!("unknown command '{other}'"))),
        };
        commands.push(compiled);
    }

    Ok(CompiledJob { field, ring, quotient, modules, factorizations, graded, semigroups, commands })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_job(extra: &str) -> String {
        format!(
            r#"{{
              "ring": {{ "vars": ["X", "Y"], "trunc": 8 }},
              "relations": ["X^2 - Y^3"],
              "modules": {{ "m": {{ "rank": 1 }} }},
              "commands": [{extra}]
            }}"#
        )
    }

    #[test]
    fn minimal_job_compiles() {
        let job = parse_job(&minimal_job(r#"{ "cmd": "hf-local", "module": "m", "window": 5 }"#))
            .unwrap();
        let compiled = compile(&job).unwrap();
        assert_eq!(compiled.commands.len(), 1);
        assert_eq!(compiled.modules["m"].rank, 1);
    }

    #[test]
    fn unknown_key_is_rejected() {
        let text = r#"{ "commands": [], "bogus": 1 }"#;
        assert!(matches!(parse_job(text), Err(JobError::Json(_))));
    }

    #[test]
    fn unknown_command_is_rejected() {
        let job = parse_job(&minimal_job(r#"{ "cmd": "frobnicate" }"#)).unwrap();
        let e = compile(&job).unwrap_err();
        assert!(e.to_string().contains("unknown command"), "{e}");
    }

    #[test]
    fn dangling_reference_is_rejected() {
        let job =
            parse_job(&minimal_job(r#"{ "cmd": "hf-local", "module": "ghost" }"#)).unwrap();
        let e = compile(&job).unwrap_err();
        assert!(e.to_string().contains("not declared"), "{e}");
    }

    #[test]
    fn bad_expression_names_source_and_column() {
        let text = r#"{
          "ring": { "vars": ["X"], "trunc": 6 },
          "relations": ["X^2 +"],
          "commands": []
        }"#;
        let e = compile(&parse_job(text).unwrap()).unwrap_err();
        let rendered = e.to_string();
        assert!(rendered.contains("X^2 +") && rendered.contains("column"), "{rendered}");
    }

    #[test]
    fn field_spec_parses_and_rejects() {
        assert_eq!(parse_field(&Some("q".into())).unwrap(), FieldSpec::Rationals);
        assert_eq!(parse_field(&Some("fp:7".into())).unwrap(), FieldSpec::PrimeField(7));
        assert!(parse_field(&Some("fp:6".into())).is_err());
        assert!(parse_field(&Some("gf:8".into())).is_err());
    }

    #[test]
    fn overrides_rewrite_trunc_and_window() {
        let mut job =
            parse_job(&minimal_job(r#"{ "cmd": "hf-local", "module": "m" }"#)).unwrap();
        let o = Overrides { trunc: Some(12), window: Some(6), ..Overrides::default() };
        apply_overrides(&mut job, &o);
        assert_eq!(job.ring.as_ref().unwrap().trunc, 12);
        assert_eq!(job.commands[0].window, Some(6));
    }

    #[test]
    fn basechange_needs_alpha_or_seed_but_not_both() {
        let with = |tail: &str| {
            minimal_job(&format!(r#"{{ "cmd": "eis-basechange", "module": "m"{tail} }}"#))
        };
        assert!(compile(&parse_job(&with("")).unwrap()).is_err());
        assert!(compile(&parse_job(&with(r#", "seed": 3"#)).unwrap()).is_ok());
        assert!(compile(&parse_job(&with(r#", "alpha": [["1"]]"#)).unwrap()).is_ok());
        assert!(
            compile(&parse_job(&with(r#", "alpha": [["1"]], "seed": 3"#)).unwrap()).is_err()
        );
    }

    #[test]
    fn singular_alpha_entries_are_an_input_error() {
        let job = parse_job(&minimal_job(
            r#"{ "cmd": "eis-basechange", "module": "m", "alpha": [["0"]] }"#,
        ))
        .unwrap();
        assert!(compile(&job).is_err());
    }

    #[test]
    fn presentation_variable_count_must_match_generators() {
        let text = r#"{
          "ring": { "vars": ["X", "Y"], "trunc": 8 },
          "relations": ["X^2 - Y^3"],
          "semigroups": { "s": [6, 7, 15] },
          "commands": [{ "cmd": "verify-presentation", "semigroup": "s" }]
        }"#;
        let e = compile(&parse_job(text).unwrap()).unwrap_err();
        assert!(e.to_string().contains("2 variables for 3 generators"), "{e}");
    }
}
