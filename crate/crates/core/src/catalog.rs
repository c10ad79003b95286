//! Named reference maps with the properties they are known to have.

use thiserror::Error;

use crate::analysis::{analyze, AnalysisConfig, CaseVerdict};
use crate::operator::{
    JointPhaseOperator, OperatorError, PhaseOperator, PhaseState, UncorrelatedTriple,
};
use crate::pmap::PmapDocument;
use crate::positivity::{is_positive_over_phase, HERMITIAN_TOL};
use crate::trigpoly::FirstOrderPoly;

pub const NAMES: [&str; 6] = [
    "counterexample",
    "case1-example",
    "case3-example",
    "footnote-linear-only",
    "projective-discard",
    "phase-state",
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatalogError {
    #[error("unknown catalog entry `{0}`")]
    UnknownName(String),
    #[error("invalid parameter in `{0}`")]
    InvalidParameter(String),
}

fn re(a: f64, b: f64, c: f64) -> FirstOrderPoly {
    FirstOrderPoly::real(a, b, c)
}

fn k(c: f64) -> FirstOrderPoly {
    FirstOrderPoly::real(0.0, 0.0, c)
}

fn triple(
    joint: Vec<FirstOrderPoly>,
    out1: Vec<FirstOrderPoly>,
    out2: Vec<FirstOrderPoly>,
) -> UncorrelatedTriple {
    let o1 = PhaseOperator::from_entries(2, out1).expect("2×2");
    let o2 = PhaseOperator::from_entries(2, out2).expect("2×2");
    let j = PhaseOperator::from_entries(4, joint).expect("4×4");
    UncorrelatedTriple::from_operators(j, o1, o2).expect("consistent dimensions")
}

/// Hermitian-preserving uncorrelated cloner with `P = ¼(x+1)(x*+1)`; not positive.
pub fn counterexample() -> UncorrelatedTriple {
    let d = re(0.125, 0.125, 0.25);
    let out = vec![d, re(0.0, 1.0, 1.0), re(1.0, 0.0, 1.0), d];
    let jd = re(0.0625, 0.0625, 0.125);
    let up = re(0.0, 0.5, 0.5);
    let lo = re(0.5, 0.0, 0.5);
    #[rustfmt::skip]
    let joint = vec![
        jd,               up,     up,     re(0.0, 4.0, 0.0),
        lo,               jd,     k(4.0), up,
        lo,               k(4.0), jd,     up,
        re(4.0, 0.0, 0.0), lo,    lo,     jd,
    ];
    triple(joint, out.clone(), out)
}

/// Positive map whose second output contains neither factor of `x·P′`.
pub fn case1_example() -> UncorrelatedTriple {
    let z = FirstOrderPoly::zero();
    let half = re(0.0625, 0.0625, 0.25);
    let out1 = vec![half, z, z, half];
    let out2 = vec![re(0.125, 0.125, 0.25), z, z, k(0.25)];
    let a = re(0.0625, 0.0625, 0.125);
    let b = k(0.125);
    #[rustfmt::skip]
    let joint = vec![
        a, z, z, z,
        z, b, z, z,
        z, z, a, z,
        z, z, z, b,
    ];
    triple(joint, out1, out2)
}

/// [`case1_example`] with the two systems exchanged.
pub fn case3_example() -> UncorrelatedTriple {
    case1_example().swapped()
}

/// Linear but not hermitian-preserving; the joint operator stays first order.
pub fn footnote_linear_only() -> UncorrelatedTriple {
    let z = FirstOrderPoly::zero();
    let one = k(1.0);
    let x = re(1.0, 0.0, 0.0);
    let xc = re(0.0, 1.0, 0.0);
    #[rustfmt::skip]
    let joint = vec![
        one, z, z, z,
        xc,  z, z, z,
        x,   z, z, z,
        one, z, z, z,
    ];
    triple(joint, vec![one, z, x, z], vec![one, z, xc, z])
}

/// Measure in the computational basis, keep outcome 0 and prepare `|0⟩` on
/// the second system. On the phase-set, `P = q`.
pub fn projective_discard(q: f64) -> UncorrelatedTriple {
    let z = FirstOrderPoly::zero();
    let out = vec![k(q), z, z, z];
    let mut joint = vec![z; 16];
    joint[0] = k(q);
    triple(joint, out.clone(), out)
}

pub fn phase_state(q: f64) -> Result<PhaseOperator, OperatorError> {
    Ok(PhaseState::new(q)?.to_operator())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Triple(UncorrelatedTriple),
    Operator(PhaseOperator),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseKind {
    ConstantProbability,
    Case1,
    Case2,
    Case3,
}

impl CaseKind {
    pub fn of(v: &CaseVerdict) -> Self {
        match v {
            CaseVerdict::ConstantProbability => Self::ConstantProbability,
            CaseVerdict::Case1 => Self::Case1,
            CaseVerdict::Case2 { .. } => Self::Case2,
            CaseVerdict::Case3 => Self::Case3,
        }
    }
}

/// Properties asserted for an entry; `None` means "not claimed".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ExpectedProperties {
    pub hp: Option<bool>,
    pub relation: Option<bool>,
    pub positive: Option<bool>,
    pub case: Option<CaseKind>,
    pub out1_phase_dependent: Option<bool>,
    pub out2_phase_dependent: Option<bool>,
    pub theorem_consistent: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub name: String,
    pub payload: Payload,
    pub expected: ExpectedProperties,
}

fn check<T: PartialEq + std::fmt::Debug>(
    out: &mut Vec<String>,
    what: &str,
    expected: Option<T>,
    got: T,
) {
    if let Some(e) = expected {
        if e != got {
            out.push(format!("{what}: expected {e:?}, got {got:?}"));
        }
    }
}

impl CatalogEntry {
    /// Triples become the three standard blocks, operators one block named after the entry.
    pub fn document(&self) -> PmapDocument {
        match &self.payload {
            Payload::Triple(t) => PmapDocument::from_triple(t),
            Payload::Operator(op) => PmapDocument::from_operator(&self.name, op),
        }
    }

    pub fn triple(&self) -> Option<&UncorrelatedTriple> {
        match &self.payload {
            Payload::Triple(t) => Some(t),
            Payload::Operator(_) => None,
        }
    }

    /// Analyzes the payload and lists every expectation it misses.
    pub fn verify(&self, cfg: &AnalysisConfig) -> Result<(), Vec<String>> {
        let e = &self.expected;
        let mut bad = Vec::new();
        match &self.payload {
            Payload::Triple(t) => {
                let r = analyze(t, cfg);
                check(&mut bad, "hermitian preservation", e.hp, r.hp_all());
                check(&mut bad, "relation", e.relation, r.relation_ok);
                check(&mut bad, "positivity", e.positive, r.all_positive());
                check(
                    &mut bad,
                    "case",
                    e.case.map(Some),
                    r.case.as_ref().ok().map(CaseKind::of),
                );
                check(
                    &mut bad,
                    "output 1 φ-dependence",
                    e.out1_phase_dependent,
                    r.out1_phase_dependent,
                );
                check(
                    &mut bad,
                    "output 2 φ-dependence",
                    e.out2_phase_dependent,
                    r.out2_phase_dependent,
                );
                check(
                    &mut bad,
                    "theorem consistency",
                    e.theorem_consistent,
                    r.theorem_consistent,
                );
            }
            Payload::Operator(op) => {
                let hp = op.is_hermitian_preserving(HERMITIAN_TOL * (1.0 + op.max_abs()));
                check(&mut bad, "hermitian preservation", e.hp, hp);
                let pos = is_positive_over_phase(op, cfg.positivity_tol, cfg.grid)
                    .is_ok_and(|v| v.positive);
                check(&mut bad, "positivity", e.positive, pos);
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(bad)
        }
    }
}

/// Splits `base(q)` into `base` and the parsed `q`.
fn split_param(name: &str) -> Result<(&str, Option<f64>), CatalogError> {
    let name = name.trim();
    let Some(open) = name.find('(') else {
        return Ok((name, None));
    };
    let inner = name[open + 1..]
        .strip_suffix(')')
        .ok_or_else(|| CatalogError::InvalidParameter(name.to_string()))?;
    let q = inner
        .trim()
        .parse::<f64>()
        .map_err(|_| CatalogError::InvalidParameter(name.to_string()))?;
    Ok((&name[..open], Some(q)))
}

/// Looks up an entry; the last two accept an optional `(q)` with `0 < q < 1`
/// (default ½).
pub fn builtin(name: &str) -> Result<CatalogEntry, CatalogError> {
    let (base, q) = split_param(name)?;
    let takes_q = matches!(base, "projective-discard" | "phase-state");
    if q.is_some() && !takes_q {
        return Err(CatalogError::InvalidParameter(name.to_string()));
    }
    let q = q.unwrap_or(0.5);
    if !(q > 0.0 && q < 1.0) {
        return Err(CatalogError::InvalidParameter(name.to_string()));
    }
    let t = |t| Payload::Triple(t);
    let (payload, expected) = match base {
        "counterexample" => (
            t(counterexample()),
            ExpectedProperties {
                hp: Some(true),
                relation: Some(true),
                positive: Some(false),
                case: Some(CaseKind::Case2),
                out1_phase_dependent: Some(true),
                out2_phase_dependent: Some(true),
                theorem_consistent: Some(true),
            },
        ),
        "case1-example" => (
            t(case1_example()),
            ExpectedProperties {
                hp: Some(true),
                relation: Some(true),
                positive: Some(true),
                case: Some(CaseKind::Case1),
                out1_phase_dependent: Some(false),
                theorem_consistent: Some(true),
                ..Default::default()
            },
        ),
        "case3-example" => (
            t(case3_example()),
            ExpectedProperties {
                hp: Some(true),
                relation: Some(true),
                positive: Some(true),
                case: Some(CaseKind::Case3),
                out2_phase_dependent: Some(false),
                theorem_consistent: Some(true),
                ..Default::default()
            },
        ),
        "footnote-linear-only" => (
            t(footnote_linear_only()),
            ExpectedProperties {
                hp: Some(false),
                relation: Some(true),
                ..Default::default()
            },
        ),
        "projective-discard" => (
            t(projective_discard(q)),
            ExpectedProperties {
                hp: Some(true),
                relation: Some(true),
                positive: Some(true),
                case: Some(CaseKind::ConstantProbability),
                out1_phase_dependent: Some(false),
                out2_phase_dependent: Some(false),
                theorem_consistent: Some(true),
            },
        ),
        "phase-state" => (
            Payload::Operator(
                phase_state(q).map_err(|_| CatalogError::InvalidParameter(name.to_string()))?,
            ),
            ExpectedProperties {
                hp: Some(true),
                positive: Some(true),
                ..Default::default()
            },
        ),
        _ => return Err(CatalogError::UnknownName(name.to_string())),
    };
    Ok(CatalogEntry {
        name: name.trim().to_string(),
        payload,
        expected,
    })
}

/// Rebuilds the joint operator of a triple from its marginals.
pub fn rebuilt_joint(
    t: &UncorrelatedTriple,
    tol: f64,
) -> Result<JointPhaseOperator, OperatorError> {
    UncorrelatedTriple::from_marginals(t.out1().clone(), t.out2().clone(), tol)
        .map(|r| r.joint().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::positivity::decompose_probability;

    #[test]
    fn counterexample_entries() {
        let t = counterexample();
        assert_eq!(*t.out1().get(0, 0), re(0.125, 0.125, 0.25));
        assert_eq!(t.probability(), re(0.25, 0.25, 0.5));
        let j = rebuilt_joint(&t, 1e-12).unwrap();
        assert!(j.as_operator().distance(t.joint().as_operator()) < 1e-15);
    }

    #[test]
    fn case1_probability() {
        let t = case1_example();
        let d = decompose_probability(&t.probability(), 1e-12).unwrap();
        assert!((d.r - (2.0 + 3f64.sqrt())).abs() < 1e-10);
        assert_eq!(t.out2().trace_poly(), t.probability());
        let j = rebuilt_joint(&t, 1e-12).unwrap();
        assert!(j.as_operator().distance(t.joint().as_operator()) < 1e-15);
    }

    #[test]
    fn discard_trace_is_q() {
        let e = builtin("projective-discard(0.3)").unwrap();
        assert_eq!(e.triple().unwrap().probability(), k(0.3));
        assert_eq!(
            builtin("projective-discard")
                .unwrap()
                .triple()
                .unwrap()
                .probability(),
            k(0.5)
        );
    }

    #[test]
    fn lookup_errors() {
        assert_eq!(
            builtin("nope"),
            Err(CatalogError::UnknownName("nope".into()))
        );
        assert!(matches!(
            builtin("phase-state(1.5)"),
            Err(CatalogError::InvalidParameter(_))
        ));
        assert!(matches!(
            builtin("counterexample(0.2)"),
            Err(CatalogError::InvalidParameter(_))
        ));
        assert!(matches!(
            builtin("phase-state(0.2"),
            Err(CatalogError::InvalidParameter(_))
        ));
    }

    #[test]
    fn every_entry_meets_its_expectations() {
        let cfg = AnalysisConfig::default();
        for name in NAMES
            .iter()
            .copied()
            .chain(["projective-discard(0.3)", "phase-state(0.2)"])
        {
            let e = builtin(name).unwrap();
            assert_eq!(e.verify(&cfg), Ok(()), "{name}");
        }
    }
}
