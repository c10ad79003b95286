//! Small dense complex matrices and Hermitian eigenvalues.

use std::ops::{Index, IndexMut};

use crate::trigpoly::Complex;

/// Square, row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Panics unless `rows` is square.
    pub fn from_rows(rows: &[Vec<Complex>]) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "matrix must be square");
        Self::from_fn(dim, |i, j| rows[i][j])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn trace(&self) -> Complex {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, k: Complex) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * k).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(u, v)| (u - v).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (0..self.dim).all(|i| (0..=i).all(|j| (self[(i, j)] - self[(j, i)].conj()).norm() <= tol))
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex;
    fn index(&self, (i, j): (usize, usize)) -> &Complex {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex {
        &mut self.data[i * self.dim + j]
    }
}

/// Smallest eigenvalue of the Hermitian 2×2 matrix `[[p, z], [z*, s]]`.
pub fn min_eigenvalue_2x2(p: f64, s: f64, z: Complex) -> f64 {
    let mean = 0.5 * (p + s);
    let half = 0.5 * (p - s);
    mean - (half * half + z.norm_sqr()).sqrt()
}

/// Iteration cap per eigenvalue in [`tridiagonal_eigenvalues`].
const MAX_QL_ITERATIONS: usize = 64;

/// Matrices up to this size are factored in stack buffers.
const STACK_DIM: usize = 8;

/// Eigenvalues (ascending) of a Hermitian matrix. Only the lower triangle is
/// read; the diagonal's imaginary part is ignored.
///
/// Householder reflections bring the matrix to Hermitian tridiagonal form,
/// whose spectrum only depends on the moduli of the off-diagonal, and the
/// resulting real tridiagonal is diagonalized by implicit QL.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut d = vec![0.0; m.dim()];
    eigenvalues_into(m, &mut d);
    d.sort_by(f64::total_cmp);
    d
}

fn eigenvalues_into(m: &CMatrix, d: &mut [f64]) {
    let n = m.dim();
    let zero = Complex::new(0.0, 0.0);
    if n <= STACK_DIM {
        let mut a = [zero; STACK_DIM * STACK_DIM];
        let mut e = [0.0; STACK_DIM];
        let mut v = [zero; STACK_DIM];
        let mut w = [zero; STACK_DIM];
        eigen_work(m, &mut a[..n * n], d, &mut e[..n], &mut v[..n], &mut w[..n]);
    } else {
        let (mut a, mut e) = (vec![zero; n * n], vec![0.0; n]);
        let (mut v, mut w) = (vec![zero; n], vec![zero; n]);
        eigen_work(m, &mut a, d, &mut e, &mut v, &mut w);
    }
}

fn eigen_work(
    m: &CMatrix,
    a: &mut [Complex],
    d: &mut [f64],
    e: &mut [f64],
    v: &mut [Complex],
    w: &mut [Complex],
) {
    let n = m.dim();
    for i in 0..n {
        for j in 0..=i {
            a[i * n + j] = m[(i, j)];
            a[j * n + i] = m[(i, j)].conj();
        }
    }
    for k in 0..n.saturating_sub(2) {
        let norm = ((k + 1)..n)
            .map(|i| a[i * n + k].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = a[(k + 1) * n + k];
        let x0_abs = x0.norm_sqr().sqrt();
        let phase = if x0_abs == 0.0 {
            Complex::new(1.0, 0.0)
        } else {
            x0 / x0_abs
        };
        let alpha = -phase * norm;
        for i in (k + 1)..n {
            v[i] = a[i * n + k];
        }
        v[k + 1] -= alpha;
        let vn = ((k + 1)..n).map(|i| v[i].norm_sqr()).sum::<f64>().sqrt();
        if vn == 0.0 {
            continue;
        }
        for vi in &mut v[(k + 1)..n] {
            *vi /= vn;
        }
        // B ← B − 2(v wᴴ + w vᴴ) with w = Bv − (vᴴBv)v.
        for i in (k + 1)..n {
            w[i] = ((k + 1)..n).map(|j| a[i * n + j] * v[j]).sum();
        }
        let kk: f64 = ((k + 1)..n).map(|i| (v[i].conj() * w[i]).re).sum();
        for i in (k + 1)..n {
            w[i] -= kk * v[i];
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                a[i * n + j] -= 2.0 * (v[i] * w[j].conj() + w[i] * v[j].conj());
            }
        }
        a[(k + 1) * n + k] = alpha;
    }
    for i in 0..n {
        d[i] = a[i * n + i].re;
        e[i] = if i + 1 < n {
            a[(i + 1) * n + i].norm_sqr().sqrt()
        } else {
            0.0
        };
    }
    tridiagonal_eigenvalues(d, e);
}

/// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix with
/// diagonal `d` and off-diagonal `e[i]` coupling `i` and `i + 1`. Leaves the
/// eigenvalues in `d`.
fn tridiagonal_eigenvalues(d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l || iter == MAX_QL_ITERATIONS {
                break;
            }
            iter += 1;
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = (g * g + 1.0).sqrt();
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = (f * f + g * g).sqrt();
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                let h = d[i + 1] - p;
                r = (d[i] - h) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = h + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

/// True when every eigenvalue of the Hermitian `m` exceeds `shift`, decided by
/// attempting a Cholesky factorization of `m − shift·I`.
pub fn eigenvalues_exceed(m: &CMatrix, shift: f64) -> bool {
    let n = m.dim();
    let zero = Complex::new(0.0, 0.0);
    let mut stack = [zero; STACK_DIM * STACK_DIM];
    let mut heap = Vec::new();
    let l: &mut [Complex] = if n <= STACK_DIM {
        &mut stack[..n * n]
    } else {
        heap.resize(n * n, zero);
        &mut heap
    };
    for j in 0..n {
        let mut d = m[(j, j)].re - shift;
        for k in 0..j {
            d -= l[j * n + k].norm_sqr();
        }
        if d.is_nan() || d <= 0.0 {
            return false;
        }
        let ljj = d.sqrt();
        l[j * n + j] = Complex::new(ljj, 0.0);
        for i in (j + 1)..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k].conj();
            }
            l[i * n + j] = s / ljj;
        }
    }
    true
}

/// Smallest eigenvalue of a Hermitian matrix: closed form for `dim ≤ 2`,
/// tridiagonal QL otherwise.
pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    match m.dim() {
        0 => 0.0,
        1 => m[(0, 0)].re,
        2 => min_eigenvalue_2x2(m[(0, 0)].re, m[(1, 1)].re, m[(0, 1)]),
        n if n <= STACK_DIM => {
            let mut d = [0.0; STACK_DIM];
            eigenvalues_into(m, &mut d[..n]);
            d[..n].iter().copied().fold(f64::INFINITY, f64::min)
        }
        _ => hermitian_eigenvalues(m)[0],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn random_hermitian(n: usize, vals: &[f64]) -> CMatrix {
        let mut it = vals.iter().cycle();
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = c(*it.next().unwrap(), 0.0);
            for j in 0..i {
                let z = c(*it.next().unwrap(), *it.next().unwrap());
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    #[test]
    fn counterexample_at_zero() {
        let m = CMatrix::from_rows(&[vec![c(0.5, 0.), c(2., 0.)], vec![c(2., 0.), c(0.5, 0.)]]);
        assert_eq!(min_eigenvalue(&m), -1.5);
        let eig = hermitian_eigenvalues(&m);
        assert!((eig[0] + 1.5).abs() < 1e-14 && (eig[1] - 2.5).abs() < 1e-14);
    }

    #[test]
    fn shifted_cholesky() {
        let m = CMatrix::from_rows(&[vec![c(0.5, 0.), c(2., 0.)], vec![c(2., 0.), c(0.5, 0.)]]);
        assert!(eigenvalues_exceed(&m, -1.6));
        assert!(!eigenvalues_exceed(&m, -1.4));
        assert!(!eigenvalues_exceed(&CMatrix::zeros(3), 0.0));
    }

    #[test]
    fn diagonal_and_degenerate() {
        let m = CMatrix::identity(4).scale(c(3.0, 0.0));
        assert_eq!(hermitian_eigenvalues(&m), vec![3.0; 4]);
        assert_eq!(min_eigenvalue(&CMatrix::zeros(5)), 0.0);
    }

    proptest! {
        #[test]
        fn analytic_2x2_matches_ql(vals in prop::collection::vec(-3.0f64..3.0, 4)) {
            let m = random_hermitian(2, &vals);
            let analytic = min_eigenvalue_2x2(m[(0, 0)].re, m[(1, 1)].re, m[(0, 1)]);
            let ql = hermitian_eigenvalues(&m)[0];
            prop_assert!((analytic - ql).abs() < 1e-10);
        }

        #[test]
        fn cholesky_agrees_with_spectrum(n in 3usize..7, vals in prop::collection::vec(-2.0f64..2.0, 49), shift in -3.0f64..1.0) {
            let m = random_hermitian(n, &vals);
            let lmin = hermitian_eigenvalues(&m)[0];
            prop_assume!((lmin - shift).abs() > 1e-9);
            prop_assert_eq!(eigenvalues_exceed(&m, shift), lmin > shift);
        }

        #[test]
        fn ql_matches_nalgebra(n in 3usize..7, vals in prop::collection::vec(-2.0f64..2.0, 49)) {
            let m = random_hermitian(n, &vals);
            let ours = hermitian_eigenvalues(&m);
            let na = DMatrix::from_fn(n, n, |i, j| m[(i, j)]);
            let mut theirs: Vec<f64> = na.symmetric_eigenvalues().iter().copied().collect();
            theirs.sort_by(f64::total_cmp);
            for (u, v) in ours.iter().zip(&theirs) {
                prop_assert!((u - v).abs() < 1e-10, "{ours:?} vs {theirs:?}");
            }
        }
    }
}
