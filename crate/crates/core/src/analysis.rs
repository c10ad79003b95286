//! Case classification, φ-dependence of normalized outputs and the positivity
//! forcing argument for uncorrelated probabilistic cloning maps.

use std::fmt;

use thiserror::Error;

use crate::matrix::CMatrix;
use crate::operator::{
    tensor, validate_triple, OperatorError, PhaseOperator, RelationReport, UncorrelatedTriple,
};
use crate::positivity::{
    decompose_probability, grid_phase, is_positive_over_phase, PositivityError, PositivityVerdict,
    DEFAULT_GRID, HERMITIAN_TOL, POSITIVITY_TOL,
};
use crate::trigpoly::{contains_root, factorize, Complex, DecompositionForm, FirstOrderPoly};

/// Coarse grid used to pick the reference phase in [`output_depends_on_phase`].
const REFERENCE_GRID: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("probability is identically zero")]
    ZeroProbabilityEverywhere,
    #[error("precondition violated: {0}")]
    PreconditionViolated(&'static str),
    #[error(transparent)]
    Positivity(#[from] PositivityError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

/// Tolerances shared by the analysis routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisConfig {
    /// Coefficientwise tolerance for relations and proportionality.
    pub tol: f64,
    /// Eigenvalues down to `-positivity_tol` count as nonnegative.
    pub positivity_tol: f64,
    /// Grid resolution of positivity sweeps.
    pub grid: usize,
    /// Relative tolerance of the factor-inlay test.
    pub root_tol: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            positivity_tol: POSITIVITY_TOL,
            grid: DEFAULT_GRID,
            root_tol: 1e-8,
        }
    }
}

/// A φ-independent operator `Γ` with `Λ(φ) = P(φ)·Γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantOperator {
    matrix: CMatrix,
}

impl ConstantOperator {
    pub fn new(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn trace(&self) -> Complex {
        self.matrix.trace()
    }

    pub fn is_unit_trace(&self, tol: f64) -> bool {
        (self.trace() - 1.0).norm() <= tol
    }
}

/// Decides whether `out/P` depends on φ.
///
/// `Γ` is read off at the grid phase where `|P|` is largest and every entry is
/// then compared with `Γ_ij·P` coefficientwise. Returns `(false, Some(Γ))`
/// when the output is proportional to `P`, `(true, None)` otherwise.
pub fn output_depends_on_phase(
    out: &PhaseOperator,
    p: &FirstOrderPoly,
    tol: f64,
) -> Result<(bool, Option<ConstantOperator>), AnalysisError> {
    if p.is_zero() {
        return Err(AnalysisError::ZeroProbabilityEverywhere);
    }
    let phi0 = (0..REFERENCE_GRID)
        .map(|k| grid_phase(k, REFERENCE_GRID))
        .max_by(|&u, &v| p.eval(u).norm().total_cmp(&p.eval(v).norm()))
        .unwrap_or(0.0);
    let p0 = p.eval(phi0);
    if p0.norm() == 0.0 {
        return Err(AnalysisError::ZeroProbabilityEverywhere);
    }
    let gamma = out.eval_matrix(phi0).scale(1.0 / p0);
    let scale = out.max_abs().max(p.max_abs()).max(1.0);
    let proportional = out
        .iter_indexed()
        .all(|(i, j, w)| w.distance(&p.scale(gamma[(i, j)])) <= tol * scale);
    if proportional {
        Ok((false, Some(ConstantOperator::new(gamma))))
    } else {
        Ok((true, None))
    }
}

/// Factored form of one nonzero output-1 entry in Case 2.
///
/// `x·W` is `s·(x + forced)` when `m = 0` and `s·(x + forced)(x + f)` when
/// `m = 1`; `s` is the scale of `form`. `has_forced_factor` is false only for
/// triples that do not actually satisfy the product relation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntryForm {
    pub i: usize,
    pub j: usize,
    pub form: DecompositionForm,
    pub has_forced_factor: bool,
    pub m: u8,
    pub f: Option<Complex>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CaseVerdict {
    ConstantProbability,
    Case1,
    Case2 {
        /// The factor of `x·P` every output-1 entry must carry.
        forced: Complex,
        entry_forms: Vec<EntryForm>,
    },
    Case3,
}

impl CaseVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            Self::ConstantProbability => "constant probability",
            Self::Case1 => "Case 1",
            Self::Case2 { .. } => "Case 2",
            Self::Case3 => "Case 3",
        }
    }

    pub fn is_case2(&self) -> bool {
        matches!(self, Self::Case2 { .. })
    }
}

impl fmt::Display for CaseVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Inlay {
    Neither,
    Either { misses_p0: bool },
    Both,
}

fn inlay(w: &FirstOrderPoly, p0: Complex, p1: Complex, double: bool, tol: f64) -> Inlay {
    // Zero entries are skipped by the caller, so contains_root cannot fail.
    let m0 = contains_root(w, p0, tol).unwrap_or(0);
    if double {
        return match m0 {
            0 => Inlay::Neither,
            1 => Inlay::Either { misses_p0: false },
            _ => Inlay::Both,
        };
    }
    let m1 = contains_root(w, p1, tol).unwrap_or(0);
    match (m0 > 0, m1 > 0) {
        (false, false) => Inlay::Neither,
        (true, true) => Inlay::Both,
        (has0, _) => Inlay::Either { misses_p0: !has0 },
    }
}

fn entry_form(
    i: usize,
    j: usize,
    w: &FirstOrderPoly,
    forced: Complex,
    tol: f64,
) -> Result<EntryForm, AnalysisError> {
    let form = factorize(w).map_err(OperatorError::from)?;
    let has_forced_factor = contains_root(w, forced, tol).map_err(OperatorError::from)? > 0;
    let offsets = form.factor_offsets();
    let (m, f) = match offsets.as_slice() {
        [u, v] if has_forced_factor => {
            let other = if (u - forced).norm() <= (v - forced).norm() {
                *v
            } else {
                *u
            };
            (1, Some(other))
        }
        [u, v] => (1, Some(if u.norm() >= v.norm() { *u } else { *v })),
        _ => (0, None),
    };
    Ok(EntryForm {
        i,
        j,
        form,
        has_forced_factor,
        m,
        f,
    })
}

/// Sorts a triple into Cases 1–3 by which factors of `x·P` the nonzero
/// output-2 entries contain. A neither-factor entry makes Case 1, otherwise an
/// either-factor entry makes Case 2, otherwise Case 3.
pub fn classify(
    t: &UncorrelatedTriple,
    cfg: &AnalysisConfig,
) -> Result<CaseVerdict, AnalysisError> {
    let p = t.probability();
    let d = match decompose_probability(&p, cfg.tol) {
        Ok(d) => d,
        Err(PositivityError::ConstantProbability) => return Ok(CaseVerdict::ConstantProbability),
        Err(e) => return Err(e.into()),
    };
    let double = d.is_double_root();
    let inlays: Vec<Inlay> = t
        .out2()
        .entries()
        .iter()
        .filter(|w| !w.is_zero())
        .map(|w| inlay(w, d.p0, d.p1, double, cfg.root_tol))
        .collect();

    if inlays.contains(&Inlay::Neither) {
        return Ok(CaseVerdict::Case1);
    }
    let misses_p0 = inlays
        .iter()
        .filter_map(|x| match x {
            Inlay::Either { misses_p0 } => Some(*misses_p0),
            _ => None,
        })
        .collect::<Vec<_>>();
    if misses_p0.is_empty() {
        return Ok(CaseVerdict::Case3);
    }
    // Output 1 has to supply whichever factor output 2 lacks.
    let forced = if misses_p0.contains(&true) {
        d.p0
    } else {
        d.p1
    };
    let entry_forms = t
        .out1()
        .iter_indexed()
        .filter(|(_, _, w)| !w.is_zero())
        .map(|(i, j, w)| entry_form(i, j, w, forced, cfg.root_tol))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CaseVerdict::Case2 {
        forced,
        entry_forms,
    })
}

fn forced_constant(
    out: &PhaseOperator,
    p: &FirstOrderPoly,
    tol: f64,
) -> Result<bool, AnalysisError> {
    match output_depends_on_phase(out, p, tol)? {
        (false, Some(gamma)) => {
            let m = gamma.matrix();
            Ok((0..m.dim()).all(|i| m[(i, i)].re >= -tol))
        }
        _ => Ok(false),
    }
}

/// Checks the conclusion positivity forces on a Case-2 triple: output 1 is
/// `P·Γ₁` with `Γ₁` constant and nonnegative on the diagonal. If the triple
/// is also Case 2 with the systems exchanged, output 2 must be `P·Γ₂` too.
pub fn case2_forcing_check(
    t: &UncorrelatedTriple,
    cfg: &AnalysisConfig,
) -> Result<bool, AnalysisError> {
    if !classify(t, cfg)?.is_case2() {
        return Err(AnalysisError::PreconditionViolated("triple is not Case 2"));
    }
    for op in [t.joint().as_operator(), t.out1(), t.out2()] {
        let v = is_positive_over_phase(op, cfg.positivity_tol, cfg.grid)?;
        if !v.positive {
            return Err(AnalysisError::PreconditionViolated(
                "operator is not positive",
            ));
        }
    }
    forcing_holds(t, cfg)
}

fn forcing_holds(t: &UncorrelatedTriple, cfg: &AnalysisConfig) -> Result<bool, AnalysisError> {
    let p = t.probability();
    if !forced_constant(t.out1(), &p, cfg.tol)? {
        return Ok(false);
    }
    if classify(&t.swapped(), cfg)?.is_case2() && !forced_constant(t.out2(), &p, cfg.tol)? {
        return Ok(false);
    }
    Ok(true)
}

/// True iff `o1 ⊗ o2` has an `e^{±2iφ}` term somewhere, which rules out a
/// deterministic product map with these marginals.
pub fn deterministic_tensor_obstruction(o1: &PhaseOperator, o2: &PhaseOperator, tol: f64) -> bool {
    tensor(o1, o2)
        .entries()
        .iter()
        .any(|lp| lp.has_second_order(tol))
}

/// Everything [`analyze`] found out about a triple.
#[derive(Debug, Clone, PartialEq)]
pub struct CloningReport {
    /// Hermitian preservation of joint, output 1 and output 2.
    pub hp_ok: [bool; 3],
    pub relation: Result<RelationReport, OperatorError>,
    pub relation_ok: bool,
    pub probability: Result<crate::positivity::ProbabilityDecomposition, PositivityError>,
    /// Positivity of joint, output 1 and output 2.
    pub positivity: [Result<PositivityVerdict, PositivityError>; 3],
    pub case: Result<CaseVerdict, AnalysisError>,
    pub out1_phase_dependent: bool,
    pub out2_phase_dependent: bool,
    /// Outcome of [`case2_forcing_check`] for positive Case-2 triples.
    pub case2_forcing: Option<bool>,
    pub theorem_consistent: bool,
}

impl CloningReport {
    pub fn hp_all(&self) -> bool {
        self.hp_ok.iter().all(|&b| b)
    }

    pub fn all_positive(&self) -> bool {
        self.positivity
            .iter()
            .all(|v| matches!(v, Ok(PositivityVerdict { positive: true, .. })))
    }

    pub fn both_phase_dependent(&self) -> bool {
        self.out1_phase_dependent && self.out2_phase_dependent
    }

    /// Most negative eigenvalue over the three sweeps, with its phase.
    pub fn worst_eigenvalue(&self) -> Option<(f64, f64)> {
        self.positivity
            .iter()
            .filter_map(|v| v.as_ref().ok())
            .map(|v| (v.min_eigenvalue, v.witness_phi.unwrap_or(f64::NAN)))
            .min_by(|a, b| a.0.total_cmp(&b.0))
    }
}

fn phase_dependent(out: &PhaseOperator, p: &FirstOrderPoly, tol: f64) -> bool {
    match output_depends_on_phase(out, p, tol) {
        Ok((dep, _)) => dep,
        Err(_) => out.is_phase_dependent(tol),
    }
}

/// Runs every check on a triple; failures end up in the report.
pub fn analyze(t: &UncorrelatedTriple, cfg: &AnalysisConfig) -> CloningReport {
    let ops = [t.joint().as_operator(), t.out1(), t.out2()];
    let hp_ok = ops.map(|op| op.is_hermitian_preserving(HERMITIAN_TOL * (1.0 + op.max_abs())));
    let relation = validate_triple(t, cfg.tol);
    let relation_ok = relation.as_ref().is_ok_and(RelationReport::all_ok);
    let p = t.probability();
    let probability = decompose_probability(&p, cfg.tol);
    let positivity = ops.map(|op| is_positive_over_phase(op, cfg.positivity_tol, cfg.grid));
    let case = classify(t, cfg);
    let out1_phase_dependent = phase_dependent(t.out1(), &p, cfg.tol);
    let out2_phase_dependent = phase_dependent(t.out2(), &p, cfg.tol);

    let mut report = CloningReport {
        hp_ok,
        relation,
        relation_ok,
        probability,
        positivity,
        case,
        out1_phase_dependent,
        out2_phase_dependent,
        case2_forcing: None,
        theorem_consistent: true,
    };
    if report.all_positive() && report.case.as_ref().is_ok_and(CaseVerdict::is_case2) {
        report.case2_forcing = forcing_holds(t, cfg).ok();
    }
    report.theorem_consistent = !(report.all_positive()
        && report.hp_all()
        && report.relation_ok
        && report.both_phase_dependent());
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::operator::{phase_state_operator, PhaseState};
    use crate::trigpoly::mul;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn cfg() -> AnalysisConfig {
        AnalysisConfig::default()
    }

    #[test]
    fn case1_output_is_half_identity() {
        let t = catalog::case1_example();
        let (dep, gamma) = output_depends_on_phase(t.out1(), &t.probability(), 1e-12).unwrap();
        assert!(!dep);
        let gamma = gamma.unwrap();
        assert!(gamma.is_unit_trace(1e-10));
        assert!(
            gamma
                .matrix()
                .max_abs_diff(&CMatrix::identity(2).scale(c(0.5, 0.0)))
                < 1e-12
        );
    }

    #[test]
    fn counterexample_outputs_depend_on_phase() {
        let t = catalog::counterexample();
        let p = t.probability();
        assert_eq!(
            output_depends_on_phase(t.out1(), &p, 1e-9).unwrap(),
            (true, None)
        );
        assert!(output_depends_on_phase(t.out2(), &p, 1e-9).unwrap().0);
    }

    #[test]
    fn proportional_output_recovers_gamma() {
        let p = FirstOrderPoly::real_valued(c(0.3, -0.4), 1.7);
        let g = CMatrix::from_rows(&[
            vec![c(0.6, 0.), c(0.1, 0.2)],
            vec![c(0.1, -0.2), c(0.4, 0.)],
        ]);
        let out = PhaseOperator::scaled_constant(&p, &g);
        let (dep, gamma) = output_depends_on_phase(&out, &p, 1e-12).unwrap();
        assert!(!dep);
        assert!(gamma.unwrap().matrix().max_abs_diff(&g) < 1e-12);
    }

    #[test]
    fn zero_probability_is_rejected() {
        let out = PhaseOperator::zeros(2).unwrap();
        assert_eq!(
            output_depends_on_phase(&out, &FirstOrderPoly::zero(), 1e-9),
            Err(AnalysisError::ZeroProbabilityEverywhere)
        );
    }

    #[test]
    fn catalog_cases() {
        assert!(classify(&catalog::counterexample(), &cfg())
            .unwrap()
            .is_case2());
        assert_eq!(
            classify(&catalog::case1_example(), &cfg()).unwrap(),
            CaseVerdict::Case1
        );
        assert_eq!(
            classify(&catalog::case3_example(), &cfg()).unwrap(),
            CaseVerdict::Case3
        );
        assert_eq!(
            classify(&catalog::projective_discard(0.3), &cfg()).unwrap(),
            CaseVerdict::ConstantProbability
        );
    }

    #[test]
    fn counterexample_entry_forms() {
        let CaseVerdict::Case2 {
            forced,
            entry_forms,
        } = classify(&catalog::counterexample(), &cfg()).unwrap()
        else {
            panic!("expected Case 2");
        };
        assert!((forced - 1.0).norm() < 1e-12);
        assert_eq!(entry_forms.len(), 4);
        for e in &entry_forms {
            assert!(e.has_forced_factor);
            if e.i == e.j {
                assert_eq!(e.m, 1);
                assert!((e.f.unwrap() - 1.0).norm() < 1e-6);
            } else if e.i == 0 {
                assert_eq!((e.m, e.f), (0, None));
            } else {
                // x + 1 = (x + 1)(0·x* + 1)
                assert_eq!(e.m, 1);
                assert!(e.f.unwrap().norm() < 1e-12);
            }
        }
    }

    #[test]
    fn forcing_check_preconditions() {
        assert_eq!(
            case2_forcing_check(&catalog::counterexample(), &cfg()),
            Err(AnalysisError::PreconditionViolated(
                "operator is not positive"
            ))
        );
        assert_eq!(
            case2_forcing_check(&catalog::case1_example(), &cfg()),
            Err(AnalysisError::PreconditionViolated("triple is not Case 2"))
        );
    }

    #[test]
    fn forcing_check_on_proportional_case2_member() {
        // out1 = P·Γ, out2 carries p₁ but not p₀ in its off-diagonal.
        let p = FirstOrderPoly::real(0.25, 0.25, 1.0);
        let r = 2.0 + 3f64.sqrt();
        let p1 = c(1.0 / r, 0.0);
        let g = CMatrix::from_rows(&[
            vec![c(0.7, 0.), c(0.2, 0.1)],
            vec![c(0.2, -0.1), c(0.3, 0.)],
        ]);
        let out1 = PhaseOperator::scaled_constant(&p, &g);
        let s = c(0.02, 0.0);
        let off = FirstOrderPoly::new(c(0.0, 0.0), s * p1, s);
        let out2 = PhaseOperator::from_entries(
            2,
            vec![p.scale(c(0.5, 0.)), off.conj(), off, p.scale(c(0.5, 0.))],
        )
        .unwrap();
        let t = UncorrelatedTriple::from_marginals(out1, out2, 1e-12).unwrap();
        assert!(classify(&t, &cfg()).unwrap().is_case2());
        assert_eq!(case2_forcing_check(&t, &cfg()), Ok(true));
        let rep = analyze(&t, &cfg());
        assert!(rep.all_positive() && rep.theorem_consistent);
        assert!(!rep.out1_phase_dependent && rep.out2_phase_dependent);
    }

    #[test]
    fn affine_off_diagonal_is_never_positive() {
        // Diagonals a·P at r = 1 with an off-diagonal s(e^{iθ}x* + 1).
        let p = FirstOrderPoly::real(0.5, 0.5, 1.0);
        let s = c(0.1, 0.0);
        let off = FirstOrderPoly::new(c(0.0, 0.0), s, s);
        let out1 = PhaseOperator::from_entries(
            2,
            vec![p.scale(c(0.5, 0.)), off.conj(), off, p.scale(c(0.5, 0.))],
        )
        .unwrap();
        let v = crate::positivity::submatrix_positivity(&out1, 0, 1, 1e-9, 4096).unwrap();
        assert!(!v.positive && v.min_eigenvalue < -1e-6);
    }

    #[test]
    fn deterministic_obstruction_examples() {
        let o = phase_state_operator(PhaseState::new(0.5).unwrap());
        assert!(deterministic_tensor_obstruction(&o, &o, 1e-12));
        let off = *o.get(0, 1);
        let sq = mul(&off, &off);
        assert!((sq.coeff(-2) - 0.25).norm() < 1e-15);

        let f = catalog::footnote_linear_only();
        assert!(!deterministic_tensor_obstruction(f.out1(), f.out2(), 1e-12));
    }

    #[test]
    fn analyze_counterexample() {
        let r = analyze(&catalog::counterexample(), &cfg());
        assert_eq!(r.hp_ok, [true; 3]);
        assert!(r.relation_ok);
        assert!(r.relation.as_ref().unwrap().max_residual() < 1e-12);
        assert!(!r.all_positive());
        assert!(r.case.as_ref().unwrap().is_case2());
        assert!(r.both_phase_dependent());
        assert!(r.theorem_consistent);
        assert!(r.worst_eigenvalue().unwrap().0 <= -1.5 + 1e-9);
    }

    #[test]
    fn analyze_case1_and_discard() {
        let r = analyze(&catalog::case1_example(), &cfg());
        assert!(r.hp_all() && r.relation_ok && r.all_positive());
        assert_eq!(r.case, Ok(CaseVerdict::Case1));
        assert!(!r.out1_phase_dependent && r.out2_phase_dependent);
        assert!(r.theorem_consistent);

        let r = analyze(&catalog::projective_discard(0.3), &cfg());
        assert_eq!(r.case, Ok(CaseVerdict::ConstantProbability));
        assert!(!r.out1_phase_dependent && !r.out2_phase_dependent);
        assert!(r.all_positive());
    }
}
