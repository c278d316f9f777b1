//! gradus-core: exact computational local algebra.
//!
//! The crate computes Hilbert functions of finitely presented modules over
//! complete-intersection quotients of power-series rings, verifies associated
//! graded presentations and depth-zero certificates, builds matrix
//! factorizations and minimal free resolutions with Betti/complexity data,
//! constructs cohomology operators with their Ext action, executes the
//! strict-CI reduction to a hypersurface deformation, and cross-validates
//! everything against an independent numerical-semigroup oracle.

pub mod expr;
pub mod field;
pub mod graded;
pub mod local;
pub mod matrix;
pub mod monomial;
pub mod operators;
pub mod poly;
pub mod resolution;
pub mod semigroup;
pub mod series;

pub use expr::{parse_poly, ParseError};
pub use field::{FieldSpec, Scalar, STRESS_PRIME};
pub use graded::{
    graded_hf, regular_sequence_test, socle_witness, verify_assoc_graded, GradedQuotient,
    GradedVerdict, RegSeqVerdict, SocleCertificate,
};
pub use local::{
    hilbert_function, layer_basis, monotonicity_report, HilbertVector, LocalError,
    ModulePresentation, MonotonicityReport, QuotientPresentation, RingTable,
};
pub use matrix::{Echelon, ExactMatrix, KernelSolver};
pub use monomial::Monomial;
pub use operators::{
    base_change_operators, ext_action, finite_generation_window, lift_complex, parameter_search,
    solve_operators, strict_reduction, transform_generators, CoefficientMatrix, ExtModule,
    FinitenessEvidence, LiftedComplex, OperatorError, OperatorFamily, ParameterElement,
    StrictReduction, StrictReductionReport,
};
pub use poly::Poly;
pub use resolution::{
    betti_table, complexity_estimate, mf_resolution, mf_verify, minimalize, resolve, syzygy_step,
    vpd_formula, BettiTable, ComplexityEstimate, FreeComplex, MatrixFactorization, Resolution,
    ResolutionError, SyzygyStep,
};
pub use semigroup::{
    monotonicity_scan, semigroup_closure, semigroup_hf, sumset_filtration, verify_presentation,
    NumericalSemigroup, PresentationVerdict, ScanConstraints, ScanReport, SemigroupError,
};
pub use series::{RingError, RingSpec};
