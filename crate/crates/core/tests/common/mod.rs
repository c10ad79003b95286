#![allow(dead_code)]

use phasemap_core::{Complex, FirstOrderPoly, PhaseOperator};
use proptest::prelude::*;

pub fn complex() -> impl Strategy<Value = Complex> {
    (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(re, im)| Complex::new(re, im))
}

pub fn poly() -> impl Strategy<Value = FirstOrderPoly> {
    (complex(), complex(), complex()).prop_map(|(a, b, c)| FirstOrderPoly::new(a, b, c))
}

/// Polynomials whose nonzero coefficients are not tiny.
pub fn nonzero_poly() -> impl Strategy<Value = FirstOrderPoly> {
    poly().prop_filter("away from zero", |p| p.max_abs() > 1e-3)
}

/// Hermitian-preserving operator with real-valued diagonal.
pub fn hp_operator(dim: usize) -> impl Strategy<Value = PhaseOperator> {
    let n_off = dim * (dim - 1) / 2;
    (
        prop::collection::vec((complex(), -2.0f64..2.0), dim),
        prop::collection::vec(poly(), n_off),
    )
        .prop_map(move |(diag, off)| {
            let mut op = PhaseOperator::zeros(dim).unwrap();
            for (i, (alpha, mean)) in diag.into_iter().enumerate() {
                op.set(i, i, FirstOrderPoly::real_valued(alpha, mean));
            }
            let mut it = off.into_iter();
            for i in 0..dim {
                for j in (i + 1)..dim {
                    let w = it.next().unwrap();
                    op.set(i, j, w);
                    op.set(j, i, w.conj());
                }
            }
            op
        })
}

pub fn grid(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| std::f64::consts::TAU * k as f64 / n as f64)
}
