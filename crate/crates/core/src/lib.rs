//! Phase-parametrized operator maps: first-order trigonometric polynomials,
//! positivity sweeps and the analysis of probabilistic uncorrelated cloning
//! of the phase-set `√q|0⟩ + √(1−q)e^{iφ}|1⟩`.

pub mod analysis;
pub mod catalog;
pub mod matrix;
pub mod operator;
pub mod pmap;
pub mod positivity;
pub mod search;
pub mod trigpoly;

pub use analysis::{
    analyze, case2_forcing_check, classify, deterministic_tensor_obstruction,
    output_depends_on_phase, AnalysisConfig, AnalysisError, CaseVerdict, CloningReport,
    ConstantOperator, EntryForm,
};
pub use catalog::{builtin, CatalogEntry, CatalogError, ExpectedProperties, Payload};
pub use matrix::{hermitian_eigenvalues, min_eigenvalue, CMatrix};
pub use operator::{
    partial_trace, phase_state_operator, tensor, validate_triple, JointPhaseOperator, Keep,
    LaurentMatrix, OperatorError, PhaseOperator, PhaseState, RelationReport, UncorrelatedTriple,
};
pub use pmap::{parse_pmap, PmapDocument, PmapError};
pub use positivity::{
    decompose_probability, is_positive_over_phase, min_eigenvalue_profile, submatrix_positivity,
    PositivityError, PositivityVerdict, ProbabilityDecomposition,
};
pub use search::{
    generate_case2_candidate, theorem_search, theorem_search_parallel, CandidateSpec,
    SamplerParams, SearchError, SearchReport,
};
pub use trigpoly::{
    contains_root, exact_div, expand, factorize, mul, Complex, DecompositionForm, FirstOrderPoly,
    LaurentPoly, TrigPolyError,
};
