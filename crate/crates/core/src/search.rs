//! Randomized search over structured Case-2 candidates.
//!
//! Each candidate fixes a probability `P = α(x + p₀)(p₁x* + 1)` and builds
//! output 1 from entries carrying the factor `(x + p₀)` and output 2 from
//! entries carrying `(x + p₁)`, so the product relation can hold. The joint
//! operator is `Λ₁ ⊗ Λ₂ / P`; candidates where that division is not exact are
//! rejected and counted.

use std::f64::consts::TAU;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::analysis::{analyze, AnalysisConfig, CaseVerdict, CloningReport};
use crate::operator::{OperatorError, PhaseOperator, UncorrelatedTriple};
use crate::trigpoly::{Complex, FirstOrderPoly, TrigPolyError};

/// Eigenvalues above this are too close to zero to count as a witness.
pub const WITNESS_THRESHOLD: f64 = -1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SearchError {
    #[error("sample rejected: tensor product is not divisible by P")]
    SampleRejected,
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

/// Shape of one entry `W` of an output, relative to that side's own factor
/// `(x + p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EntryShape {
    Zero,
    /// `x·W = s(x + p)`.
    NoSecondFactor {
        scale: Complex,
    },
    /// `W = s(x + p)(f·x* + 1)`.
    WithFactor {
        scale: Complex,
        f: Complex,
    },
}

impl EntryShape {
    pub fn poly(&self, p: Complex) -> FirstOrderPoly {
        match *self {
            Self::Zero => FirstOrderPoly::zero(),
            Self::NoSecondFactor { scale } => {
                FirstOrderPoly::new(Complex::new(0.0, 0.0), scale * p, scale)
            }
            Self::WithFactor { scale, f } => {
                FirstOrderPoly::new(scale, scale * p * f, scale * (p + f))
            }
        }
    }
}

/// Entries of one output: diagonal shapes for all but the last index (the
/// last diagonal is whatever makes the trace equal `P`) and the upper
/// off-diagonal shapes in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct SideSpec {
    pub diagonal: Vec<EntryShape>,
    pub upper: Vec<EntryShape>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSpec {
    pub alpha_abs: f64,
    pub theta: f64,
    pub r: f64,
    pub out1: SideSpec,
    pub out2: SideSpec,
}

impl CandidateSpec {
    pub fn alpha(&self) -> Complex {
        Complex::from_polar(self.alpha_abs, -self.theta)
    }

    pub fn p0(&self) -> Complex {
        Complex::from_polar(self.r, self.theta)
    }

    pub fn p1(&self) -> Complex {
        Complex::from_polar(1.0 / self.r, self.theta)
    }

    pub fn probability(&self) -> FirstOrderPoly {
        let (a, p0, p1) = (self.alpha(), self.p0(), self.p1());
        FirstOrderPoly::new(a, a * p0 * p1, a * (p0 + p1))
    }

    /// The worked counterexample as a member of the family.
    pub fn counterexample() -> Self {
        let side = SideSpec {
            diagonal: vec![EntryShape::WithFactor {
                scale: Complex::new(0.125, 0.0),
                f: Complex::new(1.0, 0.0),
            }],
            upper: vec![EntryShape::NoSecondFactor {
                scale: Complex::new(1.0, 0.0),
            }],
        };
        Self {
            alpha_abs: 0.25,
            theta: 0.0,
            r: 1.0,
            out1: side.clone(),
            out2: side,
        }
    }

    fn side_operator(&self, side: &SideSpec, own: Complex) -> Result<PhaseOperator, OperatorError> {
        let d = side.diagonal.len() + 1;
        let mut op = PhaseOperator::zeros(d)?;
        let mut rest = self.probability();
        for (i, shape) in side.diagonal.iter().enumerate() {
            let w = shape.poly(own);
            rest = rest - w;
            op.set(i, i, w);
        }
        op.set(d - 1, d - 1, rest);
        let mut it = side.upper.iter();
        for i in 0..d {
            for j in (i + 1)..d {
                let w = it.next().map_or(FirstOrderPoly::zero(), |s| s.poly(own));
                op.set(i, j, w);
                op.set(j, i, w.conj());
            }
        }
        Ok(op)
    }

    /// Builds the triple; `tol` is the divisibility tolerance for the joint.
    pub fn build(&self, tol: f64) -> Result<UncorrelatedTriple, SearchError> {
        let out1 = self.side_operator(&self.out1, self.p0())?;
        let out2 = self.side_operator(&self.out2, self.p1())?;
        UncorrelatedTriple::from_marginals(out1, out2, tol).map_err(|e| match e {
            OperatorError::Poly(TrigPolyError::NotDivisible { .. }) => SearchError::SampleRejected,
            e => e.into(),
        })
    }
}

/// Branch probabilities of the candidate sampler.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerParams {
    pub dim: usize,
    /// Probability of `r = 1` (double root of `x·P`).
    pub p_double_root: f64,
    /// Probability that one output is drawn entirely proportional to `P`.
    pub p_proportional_side: f64,
    /// Relative weights of the off-diagonal branches: proportional to `P`,
    /// second factor at a random `f`, no second factor, zero.
    pub off_diagonal_weights: [f64; 4],
    /// Probability (at `r = 1` only) of a diagonal entry that changes sign.
    pub p_sign_changing_diagonal: f64,
    /// Upper bound of `|g|/√(aᵢaⱼ)` for proportional off-diagonals.
    pub max_coupling: f64,
}

impl Default for SamplerParams {
    fn default() -> Self {
        Self {
            dim: 2,
            p_double_root: 0.5,
            p_proportional_side: 0.3,
            off_diagonal_weights: [0.3, 0.3, 0.25, 0.15],
            p_sign_changing_diagonal: 0.1,
            max_coupling: 1.2,
        }
    }
}

impl SamplerParams {
    /// Only `P·Γ` entries with a positive `Γ`.
    pub fn proportional_only() -> Self {
        Self {
            p_double_root: 0.0,
            p_proportional_side: 1.0,
            off_diagonal_weights: [1.0, 0.0, 0.0, 0.0],
            p_sign_changing_diagonal: 0.0,
            max_coupling: 0.9,
            ..Self::default()
        }
    }
}

fn unit(rng: &mut impl Rng) -> Complex {
    Complex::from_polar(1.0, rng.random_range(0.0..TAU))
}

fn pick(rng: &mut impl Rng, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.random_range(0.0..total);
    for (k, w) in weights.iter().enumerate() {
        if u < *w {
            return k;
        }
        u -= w;
    }
    weights.len() - 1
}

/// Random `f` with `|f| ∈ [0.2, 3]` kept away from `avoid`.
fn random_factor(rng: &mut impl Rng, avoid: Complex) -> Complex {
    let gap = 0.25 * avoid.norm().max(1.0);
    loop {
        let f = unit(rng) * rng.random_range(0.2..3.0);
        if (f - avoid).norm() >= gap {
            return f;
        }
    }
}

struct SideDraw<'a> {
    params: &'a SamplerParams,
    alpha: Complex,
    own: Complex,
    other: Complex,
    double: bool,
}

impl SideDraw<'_> {
    fn proportional(&self, g: Complex) -> EntryShape {
        EntryShape::WithFactor {
            scale: g * self.alpha,
            f: self.other,
        }
    }

    fn draw(&self, rng: &mut impl Rng, all_proportional: bool) -> SideSpec {
        let d = self.params.dim;
        let weights: Vec<f64> = (0..d).map(|_| rng.random_range(0.05..0.95)).collect();
        let total: f64 = weights.iter().sum();
        let a: Vec<f64> = weights.iter().map(|w| w / total).collect();

        let diagonal = (0..d - 1)
            .map(|i| {
                if !all_proportional
                    && self.double
                    && rng.random_bool(self.params.p_sign_changing_diagonal)
                {
                    // Real-valued s(x + p)(f x* + 1) with |f| = 1, f ≠ p.
                    let f = loop {
                        let f = unit(rng);
                        if (f - self.own).norm() >= 0.5 {
                            break f;
                        }
                    };
                    let t = rng.random_range(0.05..0.5);
                    EntryShape::WithFactor {
                        scale: (self.own * f).sqrt().conj() * t,
                        f,
                    }
                } else {
                    self.proportional(Complex::new(a[i], 0.0))
                }
            })
            .collect();

        let mut upper = Vec::new();
        for i in 0..d {
            for j in (i + 1)..d {
                let branch = if all_proportional {
                    0
                } else {
                    pick(rng, &self.params.off_diagonal_weights)
                };
                let shape = match branch {
                    0 => {
                        let g = unit(rng)
                            * (a[i] * a[j]).sqrt()
                            * rng.random_range(0.0..self.params.max_coupling);
                        self.proportional(g)
                    }
                    1 => EntryShape::WithFactor {
                        scale: unit(rng) * rng.random_range(0.2..1.0),
                        f: random_factor(rng, self.other),
                    },
                    2 => EntryShape::NoSecondFactor {
                        scale: unit(rng) * rng.random_range(0.2..1.0),
                    },
                    _ => EntryShape::Zero,
                };
                upper.push(shape);
            }
        }
        SideSpec { diagonal, upper }
    }
}

/// Draws the candidate for `(seed, trial)`; each trial has its own stream.
pub fn sample_candidate(seed: u64, trial: u64, params: &SamplerParams) -> CandidateSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let alpha_abs = rng.random_range(0.1..=2.0);
    let theta = rng.random_range(0.0..TAU);
    let double = rng.random_bool(params.p_double_root);
    let r = if double {
        1.0
    } else {
        1.0 + 3.0 * (1.0 - rng.random::<f64>())
    };
    let alpha = Complex::from_polar(alpha_abs, -theta);
    let (p0, p1) = (
        Complex::from_polar(r, theta),
        Complex::from_polar(1.0 / r, theta),
    );

    // 0: neither side forced proportional, 1: output 1, 2: output 2.
    let forced = if rng.random_bool(params.p_proportional_side) {
        1 + rng.random_range(0..2)
    } else {
        0
    };
    let side1 = SideDraw {
        params,
        alpha,
        own: p0,
        other: p1,
        double,
    };
    let side2 = SideDraw {
        params,
        alpha,
        own: p1,
        other: p0,
        double,
    };
    let out1 = side1.draw(&mut rng, forced == 1);
    let out2 = side2.draw(&mut rng, forced == 2);
    CandidateSpec {
        alpha_abs,
        theta,
        r,
        out1,
        out2,
    }
}

/// Builds the triple for `(seed, trial)`.
pub fn generate_case2_candidate(
    seed: u64,
    trial: u64,
    params: &SamplerParams,
    tol: f64,
) -> Result<UncorrelatedTriple, SearchError> {
    sample_candidate(seed, trial, params).build(tol)
}

/// What happened to one trial.
#[derive(Debug, Clone, PartialEq)]
pub enum TrialOutcome {
    Rejected,
    Analyzed(Box<CloningReport>),
}

pub fn evaluate(spec: &CandidateSpec, cfg: &AnalysisConfig) -> TrialOutcome {
    match spec.build(cfg.tol) {
        Ok(t) => TrialOutcome::Analyzed(Box::new(analyze(&t, cfg))),
        Err(_) => TrialOutcome::Rejected,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    pub trial: u64,
    pub min_eigenvalue: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SearchReport {
    pub trials: u64,
    pub seed: u64,
    pub accepted: u64,
    pub rejected: u64,
    pub constant_probability: u64,
    pub case1: u64,
    pub case2: u64,
    pub case3: u64,
    pub unclassified: u64,
    pub all_positive: u64,
    pub both_phase_dependent: u64,
    /// Trials that are positive, hermitian-preserving, satisfy the relation
    /// and still have both outputs φ-dependent.
    pub violations: Vec<u64>,
    /// Both outputs φ-dependent but no eigenvalue below [`WITNESS_THRESHOLD`].
    pub unsharp: Vec<u64>,
    /// Most negative eigenvalue among φ-dependent pairs.
    pub strongest_witness: Option<Witness>,
    /// Least negative eigenvalue among φ-dependent pairs.
    pub weakest_witness: Option<Witness>,
    pub forcing_checked: u64,
    pub forcing_failures: Vec<u64>,
}

impl SearchReport {
    pub fn acceptance_rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.accepted as f64 / self.trials as f64
        }
    }

    fn record(&mut self, trial: u64, outcome: &TrialOutcome) {
        self.trials += 1;
        let r = match outcome {
            TrialOutcome::Rejected => {
                self.rejected += 1;
                return;
            }
            TrialOutcome::Analyzed(r) => r,
        };
        self.accepted += 1;
        match &r.case {
            Ok(CaseVerdict::ConstantProbability) => self.constant_probability += 1,
            Ok(CaseVerdict::Case1) => self.case1 += 1,
            Ok(CaseVerdict::Case2 { .. }) => self.case2 += 1,
            Ok(CaseVerdict::Case3) => self.case3 += 1,
            Err(_) => self.unclassified += 1,
        }
        if r.all_positive() {
            self.all_positive += 1;
        }
        if !r.theorem_consistent {
            self.violations.push(trial);
        }
        if let Some(ok) = r.case2_forcing {
            self.forcing_checked += 1;
            if !ok {
                self.forcing_failures.push(trial);
            }
        }
        if r.both_phase_dependent() {
            self.both_phase_dependent += 1;
            let (min_eigenvalue, phi) = r.worst_eigenvalue().unwrap_or((f64::INFINITY, f64::NAN));
            let w = Witness {
                trial,
                min_eigenvalue,
                phi,
            };
            if min_eigenvalue.is_nan() || min_eigenvalue >= WITNESS_THRESHOLD {
                self.unsharp.push(trial);
            }
            if self
                .strongest_witness
                .is_none_or(|s| min_eigenvalue < s.min_eigenvalue)
            {
                self.strongest_witness = Some(w);
            }
            if self
                .weakest_witness
                .is_none_or(|s| min_eigenvalue > s.min_eigenvalue)
            {
                self.weakest_witness = Some(w);
            }
        }
    }

    /// Folds outcomes given in trial order.
    pub fn from_outcomes<'a>(
        seed: u64,
        outcomes: impl IntoIterator<Item = (u64, &'a TrialOutcome)>,
    ) -> Self {
        let mut rep = Self {
            seed,
            ..Self::default()
        };
        for (trial, o) in outcomes {
            rep.record(trial, o);
        }
        rep
    }
}

fn fmt_list(v: &[u64]) -> String {
    let items: Vec<String> = v.iter().map(u64::to_string).collect();
    format!("[{}]", items.join(", "))
}

fn fmt_witness(w: &Option<Witness>) -> String {
    match w {
        Some(w) => format!(
            "{{ trial: {}, min_eigenvalue: {:e}, phi: {} }}",
            w.trial, w.min_eigenvalue, w.phi
        ),
        None => "null".to_string(),
    }
}

impl fmt::Display for SearchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "trials: {}", self.trials)?;
        writeln!(f, "seed: {}", self.seed)?;
        writeln!(f, "accepted: {}", self.accepted)?;
        writeln!(f, "rejected: {}", self.rejected)?;
        writeln!(f, "acceptance_rate: {:.4}", self.acceptance_rate())?;
        writeln!(f, "constant_probability: {}", self.constant_probability)?;
        writeln!(f, "case1: {}", self.case1)?;
        writeln!(f, "case2: {}", self.case2)?;
        writeln!(f, "case3: {}", self.case3)?;
        writeln!(f, "unclassified: {}", self.unclassified)?;
        writeln!(f, "all_positive: {}", self.all_positive)?;
        writeln!(f, "both_phase_dependent: {}", self.both_phase_dependent)?;
        writeln!(f, "unsharp: {}", fmt_list(&self.unsharp))?;
        writeln!(
            f,
            "strongest_witness: {}",
            fmt_witness(&self.strongest_witness)
        )?;
        writeln!(f, "weakest_witness: {}", fmt_witness(&self.weakest_witness))?;
        writeln!(f, "forcing_checked: {}", self.forcing_checked)?;
        writeln!(f, "forcing_failures: {}", fmt_list(&self.forcing_failures))?;
        writeln!(f, "violating_trials: {}", fmt_list(&self.violations))?;
        write!(f, "violations: {}", self.violations.len())
    }
}

/// Sequential search over trials `0..trials`.
pub fn theorem_search(
    trials: u64,
    seed: u64,
    params: &SamplerParams,
    cfg: &AnalysisConfig,
) -> SearchReport {
    let outcomes: Vec<TrialOutcome> = (0..trials)
        .map(|k| evaluate(&sample_candidate(seed, k, params), cfg))
        .collect();
    SearchReport::from_outcomes(seed, (0..trials).zip(&outcomes))
}

/// Same report as [`theorem_search`], with trials spread over the rayon pool.
pub fn theorem_search_parallel(
    trials: u64,
    seed: u64,
    params: &SamplerParams,
    cfg: &AnalysisConfig,
) -> SearchReport {
    let outcomes: Vec<TrialOutcome> = (0..trials)
        .into_par_iter()
        .map(|k| evaluate(&sample_candidate(seed, k, params), cfg))
        .collect();
    SearchReport::from_outcomes(seed, (0..trials).zip(&outcomes))
}
