//! Fixtures shared by the benchmarks.

use phasemap_core::{Complex, FirstOrderPoly, PhaseOperator};

/// Deterministic spread of polynomials with all three coefficients nonzero.
pub fn polys(n: usize) -> Vec<FirstOrderPoly> {
    (0..n)
        .map(|k| {
            let t = k as f64 + 1.0;
            FirstOrderPoly::new(
                Complex::from_polar(1.0 + (0.37 * t).sin().abs(), 0.91 * t),
                Complex::from_polar(0.5 + (0.53 * t).cos().abs(), -1.7 * t),
                Complex::new((0.29 * t).sin(), (0.11 * t).cos()),
            )
        })
        .collect()
}

/// Hermitian-preserving `dim × dim` operator built from [`polys`].
pub fn hermitian_operator(dim: usize) -> PhaseOperator {
    let pool = polys(dim * dim);
    let mut op = PhaseOperator::zeros(dim).expect("dim ≥ 1");
    for i in 0..dim {
        let d = pool[i * dim + i];
        op.set(i, i, FirstOrderPoly::real_valued(d.a(), 3.0 + d.c().re));
        for j in (i + 1)..dim {
            let w = pool[i * dim + j];
            op.set(i, j, w);
            op.set(j, i, w.conj());
        }
    }
    op
}
