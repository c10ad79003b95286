//! First- and second-order trigonometric Laurent polynomials in `x = e^{iφ}`.
//!
//! A [`FirstOrderPoly`] is `a·x + b·x* + c`. Multiplying such a polynomial by
//! `x` gives the ordinary quadratic `a·x² + c·x + b`, and most of the algebra
//! here (factorization, division, factor containment) is done on that shifted
//! form.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use thiserror::Error;

pub type Complex = Complex64;

/// Relative threshold below which a coefficient counts as zero in the
/// factorization case split.
pub const ZERO_THRESHOLD: f64 = 1e-13;

const ZERO: Complex = Complex::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum TrigPolyError {
    #[error("coefficient is not finite")]
    NonFinite,
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("division by the zero polynomial")]
    ZeroDivisor,
    #[error("numerator is not divisible by the denominator (residual {residual:e})")]
    NotDivisible { residual: f64 },
}

fn finite(z: Complex) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// `a·e^{iφ} + b·e^{−iφ} + c`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FirstOrderPoly {
    a: Complex,
    b: Complex,
    c: Complex,
}

impl FirstOrderPoly {
    pub fn try_new(a: Complex, b: Complex, c: Complex) -> Result<Self, TrigPolyError> {
        if finite(a) && finite(b) && finite(c) {
            Ok(Self { a, b, c })
        } else {
            Err(TrigPolyError::NonFinite)
        }
    }

    /// Panics if any coefficient is NaN or infinite.
    pub fn new(a: Complex, b: Complex, c: Complex) -> Self {
        Self::try_new(a, b, c).expect("FirstOrderPoly coefficients must be finite")
    }

    /// Real-coefficient shorthand, used heavily by the catalog.
    pub fn real(a: f64, b: f64, c: f64) -> Self {
        Self::new(
            Complex::new(a, 0.0),
            Complex::new(b, 0.0),
            Complex::new(c, 0.0),
        )
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Complex) -> Self {
        Self::new(ZERO, ZERO, c)
    }

    /// The real-valued polynomial `α·x + α*·x* + mean`.
    pub fn real_valued(alpha: Complex, mean: f64) -> Self {
        Self::new(alpha, alpha.conj(), Complex::new(mean, 0.0))
    }

    pub fn a(&self) -> Complex {
        self.a
    }

    pub fn b(&self) -> Complex {
        self.b
    }

    pub fn c(&self) -> Complex {
        self.c
    }

    pub fn coefficients(&self) -> [Complex; 3] {
        [self.a, self.b, self.c]
    }

    pub fn max_abs(&self) -> f64 {
        self.a.norm().max(self.b.norm()).max(self.c.norm())
    }

    pub fn is_zero(&self) -> bool {
        self.a == ZERO && self.b == ZERO && self.c == ZERO
    }

    /// True if the polynomial has any `e^{±iφ}` content above `tol`.
    pub fn is_phase_dependent(&self, tol: f64) -> bool {
        self.a.norm() > tol || self.b.norm() > tol
    }

    pub fn eval(&self, phi: f64) -> Complex {
        self.eval_unit(Complex::from_polar(1.0, phi))
    }

    /// Value at `x = e^{iφ}` given on the unit circle.
    pub fn eval_unit(&self, x: Complex) -> Complex {
        self.a * x + self.b * x.conj() + self.c
    }

    /// The pointwise complex conjugate `φ ↦ W(φ)*`, i.e. `(b*, a*, c*)`.
    pub fn conj(&self) -> Self {
        Self {
            a: self.b.conj(),
            b: self.a.conj(),
            c: self.c.conj(),
        }
    }

    pub fn scale(&self, k: Complex) -> Self {
        Self::new(self.a * k, self.b * k, self.c * k)
    }

    /// Largest coefficientwise distance to `other`.
    pub fn distance(&self, other: &Self) -> f64 {
        (self.a - other.a)
            .norm()
            .max((self.b - other.b).norm())
            .max((self.c - other.c).norm())
    }

    /// `b = conj(a)` and `c` real, so `eval` is real for every φ.
    pub fn is_real_valued(&self, tol: f64) -> bool {
        (self.b - self.a.conj()).norm() <= tol && self.c.im.abs() <= tol
    }

    pub fn to_laurent(&self) -> LaurentPoly {
        let mut lp = LaurentPoly::zero();
        lp.coeff[1] = self.b;
        lp.coeff[2] = self.c;
        lp.coeff[3] = self.a;
        lp
    }

    fn zero_cutoff(&self) -> f64 {
        ZERO_THRESHOLD * (1.0 + self.max_abs())
    }
}

impl Add for FirstOrderPoly {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.a + rhs.a, self.b + rhs.b, self.c + rhs.c)
    }
}

impl Sub for FirstOrderPoly {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.a - rhs.a, self.b - rhs.b, self.c - rhs.c)
    }
}

impl Neg for FirstOrderPoly {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.a, -self.b, -self.c)
    }
}

impl Mul<Complex> for FirstOrderPoly {
    type Output = Self;
    fn mul(self, k: Complex) -> Self {
        self.scale(k)
    }
}

impl Mul<f64> for FirstOrderPoly {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        self.scale(Complex::new(k, 0.0))
    }
}

impl std::iter::Sum for FirstOrderPoly {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, p| acc + p)
    }
}

impl fmt::Display for FirstOrderPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}e^{{iφ}} + {}e^{{-iφ}} + {}",
            Shown(self.a),
            Shown(self.b),
            Shown(self.c)
        )
    }
}

/// `re±im i` without negative zeros.
struct Shown(Complex);

impl fmt::Display for Shown {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = (self.0.re + 0.0, self.0.im + 0.0);
        let sign = if im < 0.0 { '-' } else { '+' };
        write!(f, "({re}{sign}{}i)", im.abs())
    }
}

/// Laurent polynomial with degrees in `[-2, 2]`; closed under products of two
/// first-order polynomials.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LaurentPoly {
    /// `coeff[k + 2]` is the coefficient of `x^k`.
    coeff: [Complex; 5],
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Builds from `(degree, coefficient)` pairs; panics on a degree outside
    /// `[-2, 2]` or a non-finite coefficient.
    pub fn from_terms(terms: &[(i32, Complex)]) -> Self {
        let mut lp = Self::zero();
        for &(k, v) in terms {
            assert!((-2..=2).contains(&k), "degree {k} outside [-2, 2]");
            assert!(finite(v), "LaurentPoly coefficients must be finite");
            lp.coeff[(k + 2) as usize] += v;
        }
        lp
    }

    pub fn coeff(&self, degree: i32) -> Complex {
        if (-2..=2).contains(&degree) {
            self.coeff[(degree + 2) as usize]
        } else {
            ZERO
        }
    }

    pub fn coefficients(&self) -> &[Complex; 5] {
        &self.coeff
    }

    pub fn eval(&self, phi: f64) -> Complex {
        (-2..=2)
            .map(|k| self.coeff(k) * Complex::from_polar(1.0, k as f64 * phi))
            .sum()
    }

    pub fn norm_inf(&self) -> f64 {
        self.coeff.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (*self - *other).norm_inf()
    }

    pub fn has_second_order(&self, tol: f64) -> bool {
        self.coeff(2).norm() > tol || self.coeff(-2).norm() > tol
    }
}

impl Add for LaurentPoly {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (l, r) in self.coeff.iter_mut().zip(rhs.coeff) {
            *l += r;
        }
        self
    }
}

impl Sub for LaurentPoly {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for (l, r) in self.coeff.iter_mut().zip(rhs.coeff) {
            *l -= r;
        }
        self
    }
}

impl std::iter::Sum for LaurentPoly {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, p| acc + p)
    }
}

/// Coefficient convolution of two first-order polynomials.
pub fn mul(p: &FirstOrderPoly, q: &FirstOrderPoly) -> LaurentPoly {
    let lp = p.to_laurent();
    let lq = q.to_laurent();
    let mut out = LaurentPoly::zero();
    // Only indices 1..=3 (degrees -1..=1) are populated in either factor.
    for i in 1..=3 {
        for j in 1..=3 {
            out.coeff[i + j - 2] += lp.coeff[i] * lq.coeff[j];
        }
    }
    out
}

pub fn has_second_order(lp: &LaurentPoly, tol: f64) -> bool {
    lp.has_second_order(tol)
}

/// Divides `num` by `den`, requiring a first-order quotient.
///
/// Both sides are shifted to ordinary polynomials (`x²·num` and `x·den`) and
/// divided synthetically; the quotient is accepted when
/// `‖num − den·q‖∞ ≤ tol·‖num‖∞`.
pub fn exact_div(
    num: &LaurentPoly,
    den: &FirstOrderPoly,
    tol: f64,
) -> Result<FirstOrderPoly, TrigPolyError> {
    let d = [den.b, den.c, den.a];
    let cutoff = den.zero_cutoff();
    let m = match (0..3).rev().find(|&k| d[k].norm() > cutoff) {
        Some(m) => m,
        None => return Err(TrigPolyError::ZeroDivisor),
    };

    let mut rem = num.coeff;
    let mut quot = [ZERO; 5];
    for k in (m..5).rev() {
        let q = rem[k] / d[m];
        quot[k - m] = q;
        for (t, dt) in d.iter().enumerate().take(m + 1) {
            rem[k - m + t] -= q * dt;
        }
    }

    // x·q holds degrees 0..=2 of `quot`; anything above would need |degree| > 1.
    let q = FirstOrderPoly::try_new(quot[2], quot[0], quot[1])?;
    let residual = num.distance(&mul(den, &q));
    if residual <= tol * num.norm_inf() {
        Ok(q)
    } else {
        Err(TrigPolyError::NotDivisible { residual })
    }
}

/// Unique factored form of a nonzero first-order polynomial.
///
/// `Full` is `scale·(x + w0)(w1·x* + 1)`, `Affine` is `scale·(w·x* + 1)` and
/// `PureNeg` is `b·x*`. Roots of `Full` are stored larger modulus first (ties
/// broken by ascending argument), so `w0` plays the role of `p0 = r·e^{iθ}`
/// when the polynomial is a probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecompositionForm {
    Full {
        scale: Complex,
        w0: Complex,
        w1: Complex,
    },
    Affine {
        scale: Complex,
        w: Complex,
    },
    PureNeg {
        b: Complex,
    },
}

impl DecompositionForm {
    /// Values `w` such that `(x + w)` divides `x·W(x)`.
    pub fn factor_offsets(&self) -> Vec<Complex> {
        match *self {
            Self::Full { w0, w1, .. } => vec![w0, w1],
            Self::Affine { w, .. } => vec![w],
            Self::PureNeg { .. } => vec![],
        }
    }

    /// Degree of `x·W(x)` as an ordinary polynomial.
    pub fn order(&self) -> usize {
        self.factor_offsets().len()
    }

    pub fn scale(&self) -> Complex {
        match *self {
            Self::Full { scale, .. } | Self::Affine { scale, .. } => scale,
            Self::PureNeg { b } => b,
        }
    }
}

impl fmt::Display for DecompositionForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Full { scale, w0, w1 } => {
                let (scale, w0, w1) = (Shown(*scale), Shown(*w0), Shown(*w1));
                write!(f, "{scale}·(x + {w0})·({w1}·x* + 1)")
            }
            Self::Affine { scale, w } => write!(f, "{}·({}·x* + 1)", Shown(*scale), Shown(*w)),
            Self::PureNeg { b } => write!(f, "{}·x*", Shown(*b)),
        }
    }
}

/// Both roots of `a·x² + c·x + b` with `a ≠ 0`, avoiding cancellation.
pub(crate) fn quadratic_roots(a: Complex, c: Complex, b: Complex) -> (Complex, Complex) {
    let sq = (c * c - 4.0 * a * b).sqrt();
    let q = if (c.conj() * sq).re >= 0.0 {
        -(c + sq) / 2.0
    } else {
        -(c - sq) / 2.0
    };
    if q == ZERO {
        return (ZERO, ZERO);
    }
    (q / a, b / q)
}

fn canonical_arg(z: Complex) -> f64 {
    let t = z.arg();
    if t <= -PI {
        PI
    } else {
        t
    }
}

/// Larger modulus first; moduli equal to 1e-9 relative are ordered by argument.
fn canonical_order(u: Complex, v: Complex) -> (Complex, Complex) {
    let (nu, nv) = (u.norm(), v.norm());
    let ord = if (nu - nv).abs() <= 1e-9 * nu.max(nv) {
        canonical_arg(u)
            .partial_cmp(&canonical_arg(v))
            .unwrap_or(Ordering::Equal)
    } else if nu > nv {
        Ordering::Less
    } else {
        Ordering::Greater
    };
    if ord == Ordering::Greater {
        (v, u)
    } else {
        (u, v)
    }
}

pub fn factorize(p: &FirstOrderPoly) -> Result<DecompositionForm, TrigPolyError> {
    let cutoff = p.zero_cutoff();
    let (a, b, c) = (p.a, p.b, p.c);
    if a.norm() > cutoff {
        let (x0, x1) = quadratic_roots(a, c, b);
        let (w0, w1) = canonical_order(-x0, -x1);
        Ok(DecompositionForm::Full { scale: a, w0, w1 })
    } else if c.norm() > cutoff {
        Ok(DecompositionForm::Affine { scale: c, w: b / c })
    } else if b.norm() > cutoff {
        Ok(DecompositionForm::PureNeg { b })
    } else {
        Err(TrigPolyError::ZeroPolynomial)
    }
}

pub fn expand(form: &DecompositionForm) -> FirstOrderPoly {
    match *form {
        DecompositionForm::Full { scale, w0, w1 } => {
            FirstOrderPoly::new(scale, scale * w0 * w1, scale * (w0 + w1))
        }
        DecompositionForm::Affine { scale, w } => FirstOrderPoly::new(ZERO, scale * w, scale),
        DecompositionForm::PureNeg { b } => FirstOrderPoly::new(ZERO, b, ZERO),
    }
}

/// Multiplicity (0, 1 or 2) of the factor `(x + z)` in `x·W(x)`.
///
/// Tested by the value and derivative of `x·W(x)` at `x = −z`, each relative
/// to the magnitude of its terms; this stays reliable at double roots, where
/// computed roots carry only `√ε` accuracy.
pub fn contains_root(p: &FirstOrderPoly, z: Complex, tol: f64) -> Result<u8, TrigPolyError> {
    let cutoff = p.zero_cutoff();
    let keep = |v: Complex| if v.norm() > cutoff { v } else { ZERO };
    let (a, b, c) = (keep(p.a), keep(p.b), keep(p.c));
    if a == ZERO && b == ZERO && c == ZERO {
        return Err(TrigPolyError::ZeroPolynomial);
    }
    let x0 = -z;
    let r = z.norm();
    let value = a * x0 * x0 + c * x0 + b;
    if value.norm() > tol * (a.norm() * r * r + c.norm() * r + b.norm()) {
        return Ok(0);
    }
    if a == ZERO {
        return Ok(1);
    }
    let slope = 2.0 * a * x0 + c;
    if slope.norm() <= tol * (2.0 * a.norm() * r + c.norm()) {
        Ok(2)
    } else {
        Ok(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE: Complex = Complex::new(1.0, 0.0);
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn close(u: Complex, v: Complex, tol: f64) -> bool {
        (u - v).norm() <= tol
    }

    #[test]
    fn eval_counterexample_probability() {
        let p = FirstOrderPoly::real(0.25, 0.25, 0.5);
        assert!(close(p.eval(0.0), ONE, 1e-15));
        assert!(p.eval(PI).norm() < 1e-15);
        assert_eq!(FirstOrderPoly::zero().eval(1.234), ZERO);
    }

    #[test]
    fn real_valued_criterion() {
        assert!(FirstOrderPoly::real(0.25, 0.25, 0.5).is_real_valued(1e-12));
        assert!(!FirstOrderPoly::new(c(0., 1.), c(0., 1.), ZERO).is_real_valued(1e-12));
        let p = FirstOrderPoly::real_valued(c(0.3, -1.7), 0.9);
        assert!(p.is_real_valued(0.0));
        for k in 0..64 {
            let phi = 2.0 * PI * k as f64 / 64.0;
            assert!(p.eval(phi).im.abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_finite() {
        assert_eq!(
            FirstOrderPoly::try_new(c(f64::NAN, 0.), ZERO, ZERO),
            Err(TrigPolyError::NonFinite)
        );
        assert!(FirstOrderPoly::try_new(ZERO, c(0., f64::INFINITY), ZERO).is_err());
    }

    #[test]
    fn mul_examples() {
        let x = FirstOrderPoly::real(1., 0., 0.);
        let xc = FirstOrderPoly::real(0., 1., 0.);
        assert_eq!(mul(&x, &xc), LaurentPoly::from_terms(&[(0, ONE)]));

        let p = FirstOrderPoly::real(0., 1., 1.);
        let sq = mul(&p, &p);
        assert_eq!(
            sq,
            LaurentPoly::from_terms(&[(-2, ONE), (-1, c(2., 0.)), (0, ONE)])
        );
        assert!(sq.has_second_order(1e-12));
        assert!(!LaurentPoly::from_terms(&[(0, ONE)]).has_second_order(1e-12));

        // linear-only pair: constant times e^{iφ}
        let one = FirstOrderPoly::real(0., 0., 1.);
        let prod = mul(&one, &x);
        assert_eq!(prod, LaurentPoly::from_terms(&[(1, ONE)]));
        assert!(!has_second_order(&prod, 1e-12));
    }

    #[test]
    fn exact_div_counterexample_corner_entry() {
        let num = LaurentPoly::from_terms(&[(-2, ONE), (-1, c(2., 0.)), (0, ONE)]);
        let den = FirstOrderPoly::real(0.25, 0.25, 0.5);
        let q = exact_div(&num, &den, 1e-12).unwrap();
        assert_eq!(q, FirstOrderPoly::real(0., 4., 0.));
    }

    #[test]
    fn exact_div_self_is_one() {
        let p = FirstOrderPoly::new(c(0.3, 0.1), c(-1.0, 2.0), c(0.5, -0.5));
        let q = exact_div(&p.to_laurent(), &p, 1e-12).unwrap();
        assert!(q.distance(&FirstOrderPoly::real(0., 0., 1.)) < 1e-12);
    }

    #[test]
    fn exact_div_rejects_degree_three() {
        let num = LaurentPoly::from_terms(&[(2, ONE)]);
        let den = FirstOrderPoly::real(0., 1., 0.);
        match exact_div(&num, &den, 1e-12) {
            Err(TrigPolyError::NotDivisible { residual }) => assert!(residual > 0.5),
            other => panic!("expected NotDivisible, got {other:?}"),
        }
        // the would-be quotient e^{3iφ} is visibly nonzero on a grid
        let grid_max = (0..16)
            .map(|k| Complex::from_polar(1.0, 3.0 * k as f64).norm())
            .fold(0.0, f64::max);
        assert!(grid_max > 0.9);
    }

    #[test]
    fn exact_div_zero_divisor() {
        let num = LaurentPoly::from_terms(&[(0, ONE)]);
        assert_eq!(
            exact_div(&num, &FirstOrderPoly::zero(), 1e-12),
            Err(TrigPolyError::ZeroDivisor)
        );
    }

    #[test]
    fn factorize_catalog_probabilities() {
        let p = FirstOrderPoly::real(0.25, 0.25, 0.5);
        assert_eq!(
            factorize(&p).unwrap(),
            DecompositionForm::Full {
                scale: c(0.25, 0.),
                w0: ONE,
                w1: ONE
            }
        );

        let s3 = 3f64.sqrt();
        let p = FirstOrderPoly::real(1. / 8., (2. + s3) * (2. - s3) / 8., 0.5);
        match factorize(&p).unwrap() {
            DecompositionForm::Full { scale, w0, w1 } => {
                assert!(close(scale, c(0.125, 0.), 1e-15));
                assert!(close(w0, c(2. + s3, 0.), 1e-10));
                assert!(close(w1, c(2. - s3, 0.), 1e-10));
            }
            other => panic!("unexpected {other:?}"),
        }

        assert_eq!(
            factorize(&FirstOrderPoly::real(0., 1., 0.)).unwrap(),
            DecompositionForm::PureNeg { b: ONE }
        );
        assert_eq!(
            factorize(&FirstOrderPoly::real(0., 2., 4.)).unwrap(),
            DecompositionForm::Affine {
                scale: c(4., 0.),
                w: c(0.5, 0.)
            }
        );
        assert_eq!(
            factorize(&FirstOrderPoly::zero()),
            Err(TrigPolyError::ZeroPolynomial)
        );
    }

    #[test]
    fn factorize_treats_roundoff_leading_coefficient_as_zero() {
        let p = FirstOrderPoly::new(c(1e-15, 0.), c(1., 0.), c(2., 0.));
        assert!(matches!(
            factorize(&p).unwrap(),
            DecompositionForm::Affine { .. }
        ));
    }

    #[test]
    fn expand_examples() {
        let full = DecompositionForm::Full {
            scale: c(0.25, 0.),
            w0: ONE,
            w1: ONE,
        };
        assert_eq!(expand(&full), FirstOrderPoly::real(0.25, 0.25, 0.5));
        let k = c(0.7, -0.2);
        assert_eq!(
            expand(&DecompositionForm::Affine { scale: k, w: ZERO }),
            FirstOrderPoly::constant(k)
        );
    }

    #[test]
    fn contains_root_examples() {
        let diag = FirstOrderPoly::real(1. / 8., 1. / 8., 1. / 4.);
        assert_eq!(contains_root(&diag, ONE, 1e-8).unwrap(), 2);
        let off = FirstOrderPoly::real(0., 1., 1.);
        assert_eq!(contains_root(&off, ONE, 1e-8).unwrap(), 1);
        let k = FirstOrderPoly::real(0., 0., 1.);
        assert_eq!(contains_root(&k, ONE, 1e-8).unwrap(), 0);
        assert_eq!(
            contains_root(&FirstOrderPoly::zero(), ONE, 1e-8),
            Err(TrigPolyError::ZeroPolynomial)
        );
    }

    #[test]
    fn contains_root_double_root_from_rounded_coefficients() {
        // s(x+p)² expanded in floating point with an off-axis unit root
        let p = Complex::from_polar(1.0, 0.731);
        let s = c(0.37, -0.21);
        let w = FirstOrderPoly::new(s, s * p * p, s * 2.0 * p);
        assert_eq!(contains_root(&w, p, 1e-8).unwrap(), 2);
        let other = Complex::from_polar(1.0, 0.731 + 1e-3);
        assert_eq!(contains_root(&w, other, 1e-8).unwrap(), 0);
    }

    #[test]
    fn canonical_order_is_descending_modulus() {
        let (u, v) = canonical_order(c(0.5, 0.), c(-3., 0.));
        assert_eq!((u, v), (c(-3., 0.), c(0.5, 0.)));
        let (u, v) = canonical_order(c(0., 1.), c(1., 0.));
        assert_eq!((u, v), (c(1., 0.), c(0., 1.)));
    }

    #[test]
    fn laurent_eval_matches_product() {
        let p = FirstOrderPoly::new(c(0.2, 0.3), c(-0.4, 0.1), c(1.1, 0.));
        let q = FirstOrderPoly::new(c(-0.7, 0.0), c(0.5, 0.5), c(0.0, 0.3));
        let lp = mul(&p, &q);
        for k in 0..32 {
            let phi = 0.2 * k as f64;
            let want = p.eval(phi) * q.eval(phi);
            assert_abs_diff_eq!(lp.eval(phi).re, want.re, epsilon = 1e-13);
            assert_abs_diff_eq!(lp.eval(phi).im, want.im, epsilon = 1e-13);
        }
    }
}
