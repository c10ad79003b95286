//! Positivity of probabilities and of Hermitian phase-operator families.
//!
//! Positivity is certified numerically: the smallest eigenvalue is sampled on
//! a uniform φ grid and the coarse minimum is refined by golden-section search
//! inside its bracketing cell.

use std::f64::consts::TAU;

use thiserror::Error;

use crate::matrix::{eigenvalues_exceed, min_eigenvalue, min_eigenvalue_2x2};
use crate::operator::PhaseOperator;
use crate::trigpoly::{Complex, FirstOrderPoly, ZERO_THRESHOLD};

/// Default grid resolution for positivity sweeps.
pub const DEFAULT_GRID: usize = 4096;
/// Eigenvalues down to `-POSITIVITY_TOL` still count as nonnegative.
pub const POSITIVITY_TOL: f64 = 1e-9;
/// Entrywise tolerance for the hermiticity precondition.
pub const HERMITIAN_TOL: f64 = 1e-9;

const REFINE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum PositivityError {
    #[error("probability is not real-valued")]
    NotRealValued,
    #[error("probability does not depend on the phase")]
    ConstantProbability,
    #[error("probability takes negative values (R/|α| = {ratio})")]
    NotPositive { ratio: f64 },
    #[error("operator is not hermitian-preserving")]
    NotHermitian,
    #[error("indices ({i}, {j}) are not two distinct indices below {dim}")]
    IndexOutOfRange { i: usize, j: usize, dim: usize },
}

/// `P(φ) = 2|α|cos(φ − θ) + R` in its factored form
/// `|α|e^{−iθ}(e^{iφ} + p₀)(p₁e^{−iφ} + 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityDecomposition {
    pub alpha_abs: f64,
    pub theta: f64,
    /// The constant term `R`.
    pub mean: f64,
    /// Root of `r + 1/r = R/|α|` with `r ≥ 1`.
    pub r: f64,
    /// `r·e^{iθ}`.
    pub p0: Complex,
    /// `e^{iθ}/r`.
    pub p1: Complex,
}

impl ProbabilityDecomposition {
    pub fn alpha(&self) -> Complex {
        Complex::from_polar(self.alpha_abs, -self.theta)
    }

    pub fn ratio(&self) -> f64 {
        self.mean / self.alpha_abs
    }

    /// True when `p₀ = p₁` (`r = 1`), i.e. `P` touches zero.
    pub fn is_double_root(&self) -> bool {
        self.r == 1.0
    }
}

/// Factors a real, phase-dependent, nonnegative probability.
///
/// `tol` bounds both the real-valuedness check and the boundary band around
/// `R/|α| = 2`; inside the band `r` is set to exactly 1.
pub fn decompose_probability(
    p: &FirstOrderPoly,
    tol: f64,
) -> Result<ProbabilityDecomposition, PositivityError> {
    if !p.is_real_valued(tol) {
        return Err(PositivityError::NotRealValued);
    }
    let alpha = p.a();
    let alpha_abs = alpha.norm();
    if alpha_abs <= ZERO_THRESHOLD * (1.0 + p.max_abs()) {
        return Err(PositivityError::ConstantProbability);
    }
    let theta = -alpha.arg();
    let mean = p.c().re;
    let ratio = mean / alpha_abs;
    if ratio < 2.0 - tol {
        return Err(PositivityError::NotPositive { ratio });
    }
    let r = if ratio <= 2.0 + tol {
        1.0
    } else {
        0.5 * (ratio + (ratio * ratio - 4.0).sqrt())
    };
    Ok(ProbabilityDecomposition {
        alpha_abs,
        theta,
        mean,
        r,
        p0: Complex::from_polar(r, theta),
        p1: Complex::from_polar(1.0 / r, theta),
    })
}

/// Result of a positivity sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositivityVerdict {
    pub positive: bool,
    /// Phase of the most negative eigenvalue; present iff not positive.
    pub witness_phi: Option<f64>,
    pub min_eigenvalue: f64,
}

pub fn grid_phase(k: usize, n: usize) -> f64 {
    TAU * k as f64 / n as f64
}

fn ensure_hermitian(op: &PhaseOperator) -> Result<(), PositivityError> {
    if op.is_hermitian_preserving(HERMITIAN_TOL * (1.0 + op.max_abs())) {
        Ok(())
    } else {
        Err(PositivityError::NotHermitian)
    }
}

/// `(φ_k, λ_min(φ_k))` on `n` uniformly spaced phases in `[0, 2π)`.
pub fn min_eigenvalue_profile(
    op: &PhaseOperator,
    n: usize,
) -> Result<Vec<(f64, f64)>, PositivityError> {
    ensure_hermitian(op)?;
    Ok((0..n)
        .map(|k| {
            let phi = grid_phase(k, n);
            (phi, min_eigenvalue(&op.eval_matrix(phi)))
        })
        .collect())
}

/// Grid minimum of `f`, refined by golden-section search over the two grid
/// cells around it. Returns `(φ, f(φ))`.
pub(crate) fn refined_minimum(f: impl Fn(f64) -> f64, n: usize) -> (f64, f64) {
    assert!(n > 0, "grid needs at least one point");
    let (mut best_phi, mut best) = (0.0, f64::INFINITY);
    for k in 0..n {
        let phi = grid_phase(k, n);
        let v = f(phi);
        if v < best {
            best = v;
            best_phi = phi;
        }
    }
    refine(&f, best_phi, best, n)
}

fn refine(f: &impl Fn(f64) -> f64, best_phi: f64, best: f64, n: usize) -> (f64, f64) {
    let h = TAU / n as f64;
    let (phi, v) = golden_section(f, best_phi - h, best_phi + h);
    if v < best {
        (phi.rem_euclid(TAU), v)
    } else {
        (best_phi, best)
    }
}

/// Points sampled exactly before the pruned sweep starts.
const SEED_POINTS: usize = 64;

/// [`refined_minimum`] of `λ_min(op(φ))`. After seeding the running minimum
/// on a sparse subgrid, a grid point is only diagonalized when a shifted
/// Cholesky factorization cannot certify that it lies above that minimum.
fn eigen_minimum(op: &PhaseOperator, n: usize) -> (f64, f64) {
    assert!(n > 0, "grid needs at least one point");
    let lmin = |phi: f64| min_eigenvalue(&op.eval_matrix(phi));
    if op.dim() <= 2 {
        return refined_minimum(lmin, n);
    }
    let stride = (n / SEED_POINTS).max(1);
    let (mut best_phi, mut best) = (0.0, f64::INFINITY);
    for k in (0..n).step_by(stride) {
        let phi = grid_phase(k, n);
        let v = lmin(phi);
        if v < best {
            best = v;
            best_phi = phi;
        }
    }
    for k in (0..n).filter(|k| k % stride != 0) {
        let phi = grid_phase(k, n);
        let m = op.eval_matrix(phi);
        if eigenvalues_exceed(&m, best) {
            continue;
        }
        let v = min_eigenvalue(&m);
        if v < best {
            best = v;
            best_phi = phi;
        }
    }
    refine(&lmin, best_phi, best, n)
}

fn golden_section(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > REFINE_TOL {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

fn verdict(phi: f64, min: f64, tol: f64) -> PositivityVerdict {
    let positive = min >= -tol;
    PositivityVerdict {
        positive,
        witness_phi: (!positive).then_some(phi),
        min_eigenvalue: min,
    }
}

pub fn is_positive_over_phase(
    op: &PhaseOperator,
    tol: f64,
    n: usize,
) -> Result<PositivityVerdict, PositivityError> {
    ensure_hermitian(op)?;
    let (phi, min) = eigen_minimum(op, n);
    Ok(verdict(phi, min, tol))
}

/// Positivity of the 2×2 family built from entries `ii, ji, ij, jj`.
pub fn submatrix_positivity(
    op: &PhaseOperator,
    i: usize,
    j: usize,
    tol: f64,
    n: usize,
) -> Result<PositivityVerdict, PositivityError> {
    let dim = op.dim();
    if i == j || i >= dim || j >= dim {
        return Err(PositivityError::IndexOutOfRange { i, j, dim });
    }
    ensure_hermitian(op)?;
    let (pii, pjj, pji) = (*op.get(i, i), *op.get(j, j), *op.get(j, i));
    let lmin = |phi: f64| min_eigenvalue_2x2(pii.eval(phi).re, pjj.eval(phi).re, pji.eval(phi));
    let (phi, min) = refined_minimum(lmin, n);
    Ok(verdict(phi, min, tol))
}

/// Minimum of a real-valued first-order polynomial on the refined grid.
pub fn grid_minimum(p: &FirstOrderPoly, n: usize) -> f64 {
    refined_minimum(|phi| p.eval(phi).re, n).1
}
