//! Operator-valued functions of the input phase.
//!
//! A [`PhaseOperator`] is a square matrix whose entries are first-order
//! polynomials in `e^{±iφ}`: the output `Λ(φ)` of a linear map restricted to
//! the phase-set. Joint (two-system) operators index rows and columns as
//! `i·d₂ + μ`, system 1 major.

use thiserror::Error;

use crate::matrix::CMatrix;
use crate::trigpoly::{exact_div, mul, Complex, FirstOrderPoly, LaurentPoly, TrigPolyError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorError {
    #[error("dimension must be at least 1")]
    EmptyDimension,
    #[error("expected {expected} entries, got {got}")]
    EntryCount { expected: usize, got: usize },
    #[error("joint dimension {joint} does not equal {dim1} × {dim2}")]
    DimensionMismatch {
        joint: usize,
        dim1: usize,
        dim2: usize,
    },
    #[error("phase-state parameter q = {0} must lie strictly between 0 and 1")]
    InvalidPhaseState(f64),
    #[error("probability is identically zero")]
    ZeroProbabilityEverywhere,
    #[error("probability vanishes at φ = {phi}")]
    ZeroProbabilityAtPhase { phi: f64 },
    #[error(transparent)]
    Poly(#[from] TrigPolyError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseOperator {
    dim: usize,
    entries: Vec<FirstOrderPoly>,
}

impl PhaseOperator {
    pub fn zeros(dim: usize) -> Result<Self, OperatorError> {
        if dim == 0 {
            return Err(OperatorError::EmptyDimension);
        }
        Ok(Self {
            dim,
            entries: vec![FirstOrderPoly::zero(); dim * dim],
        })
    }

    pub fn from_entries(dim: usize, entries: Vec<FirstOrderPoly>) -> Result<Self, OperatorError> {
        if dim == 0 {
            return Err(OperatorError::EmptyDimension);
        }
        if entries.len() != dim * dim {
            return Err(OperatorError::EntryCount {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        Ok(Self { dim, entries })
    }

    /// Panics if `dim == 0`.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> FirstOrderPoly) -> Self {
        assert!(dim > 0, "dimension must be at least 1");
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        Self { dim, entries }
    }

    /// Diagonal operator; panics on an empty slice.
    pub fn diagonal(diag: &[FirstOrderPoly]) -> Self {
        Self::from_fn(diag.len(), |i, j| {
            if i == j {
                diag[i]
            } else {
                FirstOrderPoly::zero()
            }
        })
    }

    /// The constant operator `P(φ)·Γ`.
    pub fn scaled_constant(p: &FirstOrderPoly, gamma: &CMatrix) -> Self {
        Self::from_fn(gamma.dim(), |i, j| p.scale(gamma[(i, j)]))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &FirstOrderPoly {
        &self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: FirstOrderPoly) {
        self.entries[i * self.dim + j] = p;
    }

    pub fn entries(&self) -> &[FirstOrderPoly] {
        &self.entries
    }

    /// `(i, j, entry)` in row-major order.
    pub fn iter_indexed(&self) -> impl Iterator<Item = (usize, usize, &FirstOrderPoly)> {
        let d = self.dim;
        self.entries
            .iter()
            .enumerate()
            .map(move |(k, p)| (k / d, k % d, p))
    }

    pub fn max_abs(&self) -> f64 {
        self.entries
            .iter()
            .map(FirstOrderPoly::max_abs)
            .fold(0.0, f64::max)
    }

    pub fn distance(&self, other: &Self) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(p, q)| p.distance(q))
            .fold(0.0, f64::max)
    }

    pub fn eval_matrix(&self, phi: f64) -> CMatrix {
        let x = Complex::from_polar(1.0, phi);
        CMatrix::from_fn(self.dim, |i, j| self.get(i, j).eval_unit(x))
    }

    pub fn trace_poly(&self) -> FirstOrderPoly {
        (0..self.dim).map(|i| *self.get(i, i)).sum()
    }

    /// Entrywise: `a_ji = conj(b_ij)`, `b_ji = conj(a_ij)`, `c_ji = conj(c_ij)`.
    pub fn is_hermitian_preserving(&self, tol: f64) -> bool {
        (0..self.dim)
            .all(|i| (0..=i).all(|j| self.get(j, i).distance(&self.get(i, j).conj()) <= tol))
    }

    /// True if any entry carries `e^{±iφ}` content above `tol`.
    pub fn is_phase_dependent(&self, tol: f64) -> bool {
        self.entries.iter().any(|p| p.is_phase_dependent(tol))
    }

    pub fn transpose_conj(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    /// Output state `Λ(φ)/P(φ)`.
    pub fn normalized_output(
        &self,
        p: &FirstOrderPoly,
        phi: f64,
        tol: f64,
    ) -> Result<CMatrix, OperatorError> {
        let pv = p.eval(phi);
        if pv.norm() <= tol {
            return Err(OperatorError::ZeroProbabilityAtPhase { phi });
        }
        Ok(self.eval_matrix(phi).scale(pv.inv()))
    }
}

/// Matrix of second-order Laurent polynomials, as produced by [`tensor`].
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentMatrix {
    dim: usize,
    entries: Vec<LaurentPoly>,
}

impl LaurentMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &LaurentPoly {
        &self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[LaurentPoly] {
        &self.entries
    }

    pub fn trace(&self) -> LaurentPoly {
        (0..self.dim).map(|i| *self.get(i, i)).sum()
    }
}

/// Kronecker product with entrywise polynomial multiplication.
pub fn tensor(o1: &PhaseOperator, o2: &PhaseOperator) -> LaurentMatrix {
    let (d1, d2) = (o1.dim(), o2.dim());
    let dim = d1 * d2;
    let mut entries = Vec::with_capacity(dim * dim);
    for row in 0..dim {
        let (i, mu) = (row / d2, row % d2);
        for col in 0..dim {
            let (j, nu) = (col / d2, col % d2);
            entries.push(mul(o1.get(i, j), o2.get(mu, nu)));
        }
    }
    LaurentMatrix { dim, entries }
}

/// Which subsystem survives a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    First,
    Second,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointPhaseOperator {
    dim1: usize,
    dim2: usize,
    op: PhaseOperator,
}

impl JointPhaseOperator {
    pub fn new(dim1: usize, dim2: usize, op: PhaseOperator) -> Result<Self, OperatorError> {
        if dim1 == 0 || dim2 == 0 {
            return Err(OperatorError::EmptyDimension);
        }
        if op.dim() != dim1 * dim2 {
            return Err(OperatorError::DimensionMismatch {
                joint: op.dim(),
                dim1,
                dim2,
            });
        }
        Ok(Self { dim1, dim2, op })
    }

    pub fn dim1(&self) -> usize {
        self.dim1
    }

    pub fn dim2(&self) -> usize {
        self.dim2
    }

    pub fn as_operator(&self) -> &PhaseOperator {
        &self.op
    }

    /// Entry `[Λ₁₂]_{iμ, jν}`.
    pub fn entry(&self, i: usize, mu: usize, j: usize, nu: usize) -> &FirstOrderPoly {
        self.op.get(i * self.dim2 + mu, j * self.dim2 + nu)
    }

    pub fn partial_trace(&self, keep: Keep) -> PhaseOperator {
        match keep {
            Keep::First => PhaseOperator::from_fn(self.dim1, |i, j| {
                (0..self.dim2).map(|mu| *self.entry(i, mu, j, mu)).sum()
            }),
            Keep::Second => PhaseOperator::from_fn(self.dim2, |mu, nu| {
                (0..self.dim1).map(|i| *self.entry(i, mu, i, nu)).sum()
            }),
        }
    }

    /// The same operator with the two subsystems exchanged.
    pub fn swapped(&self) -> Self {
        let (d1, d2) = (self.dim1, self.dim2);
        let op = PhaseOperator::from_fn(d1 * d2, |row, col| {
            let (mu, i) = (row / d1, row % d1);
            let (nu, j) = (col / d1, col % d1);
            *self.entry(i, mu, j, nu)
        });
        Self {
            dim1: d2,
            dim2: d1,
            op,
        }
    }
}

pub fn partial_trace(j: &JointPhaseOperator, keep: Keep) -> PhaseOperator {
    j.partial_trace(keep)
}

/// `(Λ₁₂, Λ₁, Λ₂)` claimed to satisfy `P·Λ₁₂ = Λ₁ ⊗ Λ₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct UncorrelatedTriple {
    joint: JointPhaseOperator,
    out1: PhaseOperator,
    out2: PhaseOperator,
}

impl UncorrelatedTriple {
    pub fn new(
        joint: JointPhaseOperator,
        out1: PhaseOperator,
        out2: PhaseOperator,
    ) -> Result<Self, OperatorError> {
        if joint.dim1() != out1.dim() || joint.dim2() != out2.dim() {
            return Err(OperatorError::DimensionMismatch {
                joint: joint.as_operator().dim(),
                dim1: out1.dim(),
                dim2: out2.dim(),
            });
        }
        Ok(Self { joint, out1, out2 })
    }

    /// Builds the triple from its marginals and a plain joint operator.
    pub fn from_operators(
        joint: PhaseOperator,
        out1: PhaseOperator,
        out2: PhaseOperator,
    ) -> Result<Self, OperatorError> {
        let joint = JointPhaseOperator::new(out1.dim(), out2.dim(), joint)?;
        Self::new(joint, out1, out2)
    }

    /// Builds the joint operator as `Λ₁ ⊗ Λ₂ / P` with `P = Tr Λ₁`.
    pub fn from_marginals(
        out1: PhaseOperator,
        out2: PhaseOperator,
        tol: f64,
    ) -> Result<Self, OperatorError> {
        let p = out1.trace_poly();
        if p.is_zero() {
            return Err(OperatorError::ZeroProbabilityEverywhere);
        }
        let t = tensor(&out1, &out2);
        let dim = t.dim();
        let entries = t
            .entries()
            .iter()
            .map(|lp| exact_div(lp, &p, tol))
            .collect::<Result<Vec<_>, _>>()?;
        let joint = PhaseOperator::from_entries(dim, entries)?;
        Self::from_operators(joint, out1, out2)
    }

    pub fn joint(&self) -> &JointPhaseOperator {
        &self.joint
    }

    pub fn out1(&self) -> &PhaseOperator {
        &self.out1
    }

    pub fn out2(&self) -> &PhaseOperator {
        &self.out2
    }

    /// `P(φ) = Tr Λ₁(φ)`.
    pub fn probability(&self) -> FirstOrderPoly {
        self.out1.trace_poly()
    }

    /// Exchanges systems 1 and 2.
    pub fn swapped(&self) -> Self {
        Self {
            joint: self.joint.swapped(),
            out1: self.out2.clone(),
            out2: self.out1.clone(),
        }
    }
}

/// Outcome of checking a triple against the anomalous relation.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationReport {
    pub traces_equal: bool,
    pub relation_holds: bool,
    pub partial_traces_consistent: bool,
    pub trace_residual: f64,
    pub relation_residual: f64,
    pub partial_trace_residual: f64,
}

impl RelationReport {
    pub fn all_ok(&self) -> bool {
        self.traces_equal && self.relation_holds && self.partial_traces_consistent
    }

    pub fn max_residual(&self) -> f64 {
        self.trace_residual
            .max(self.relation_residual)
            .max(self.partial_trace_residual)
    }
}

pub fn validate_triple(t: &UncorrelatedTriple, tol: f64) -> Result<RelationReport, OperatorError> {
    let p = t.probability();
    if p.is_zero() {
        return Err(OperatorError::ZeroProbabilityEverywhere);
    }
    let p2 = t.out2.trace_poly();
    let p12 = t.joint.as_operator().trace_poly();
    let trace_residual = p.distance(&p2).max(p.distance(&p12));

    let (d1, d2) = (t.out1.dim(), t.out2.dim());
    let mut relation_residual: f64 = 0.0;
    let mut divisible = true;
    for i in 0..d1 {
        for j in 0..d1 {
            for mu in 0..d2 {
                for nu in 0..d2 {
                    let num = mul(t.out1.get(i, j), t.out2.get(mu, nu));
                    let target = t.joint.entry(i, mu, j, nu);
                    match exact_div(&num, &p, tol) {
                        Ok(q) => relation_residual = relation_residual.max(q.distance(target)),
                        Err(TrigPolyError::NotDivisible { residual }) => {
                            divisible = false;
                            relation_residual = relation_residual.max(residual);
                        }
                        Err(e) => return Err(e.into()),
                    }
                }
            }
        }
    }

    let partial_trace_residual = t
        .joint
        .partial_trace(Keep::First)
        .distance(&t.out1)
        .max(t.joint.partial_trace(Keep::Second).distance(&t.out2));

    Ok(RelationReport {
        traces_equal: trace_residual <= tol,
        relation_holds: divisible && relation_residual <= tol,
        partial_traces_consistent: partial_trace_residual <= tol,
        trace_residual,
        relation_residual,
        partial_trace_residual,
    })
}

/// Amplitude parameter of `√q|0⟩ + √(1−q)e^{iφ}|1⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseState {
    q: f64,
}

impl PhaseState {
    pub fn new(q: f64) -> Result<Self, OperatorError> {
        if q > 0.0 && q < 1.0 {
            Ok(Self { q })
        } else {
            Err(OperatorError::InvalidPhaseState(q))
        }
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// The projector `|φ⟩⟨φ|` as a function of φ.
    pub fn to_operator(&self) -> PhaseOperator {
        let q = self.q;
        let off = (q * (1.0 - q)).sqrt();
        PhaseOperator::from_entries(
            2,
            vec![
                FirstOrderPoly::real(0.0, 0.0, q),
                FirstOrderPoly::real(0.0, off, 0.0),
                FirstOrderPoly::real(off, 0.0, 0.0),
                FirstOrderPoly::real(0.0, 0.0, 1.0 - q),
            ],
        )
        .expect("2×2 operator")
    }
}

pub fn phase_state_operator(s: PhaseState) -> PhaseOperator {
    s.to_operator()
}
