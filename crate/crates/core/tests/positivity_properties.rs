use std::f64::consts::TAU;

use phasemap_core::positivity::grid_minimum;
use phasemap_core::{decompose_probability, Complex, FirstOrderPoly};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn factorability_matches_brute_force_minimum(
        alpha_abs in 0.01f64..3.0, theta in 0.0f64..TAU, ratio in -1.0f64..5.0,
    ) {
        let p = FirstOrderPoly::real_valued(Complex::from_polar(alpha_abs, -theta), ratio * alpha_abs);
        let ok = decompose_probability(&p, TOL).is_ok();
        let nonneg = grid_minimum(&p, 4096) >= -TOL;
        // Within the boundary band both answers are legitimate.
        if (ratio - 2.0).abs() > 2.0 * TOL && grid_minimum(&p, 4096).abs() > 2.0 * TOL * alpha_abs.max(1.0) {
            prop_assert_eq!(ok, nonneg, "ratio {}", ratio);
        }
    }
}

#[test]
fn boundary_band() {
    // θ = 0 puts a grid point exactly on the minimum.
    for alpha_abs in [0.1, 0.25, 1.0, 2.5] {
        for offset in [-1e-6, -1e-8, -0.5e-9, 0.0, 0.5e-9, 1e-8, 1e-6] {
            let ratio: f64 = 2.0 + offset;
            let p = FirstOrderPoly::real_valued(Complex::new(alpha_abs, 0.0), ratio * alpha_abs);
            let ok = decompose_probability(&p, TOL).is_ok();
            assert_eq!(ok, ratio >= 2.0 - TOL, "ratio {ratio}");
            if ok && ratio <= 2.0 + TOL {
                assert_eq!(decompose_probability(&p, TOL).unwrap().r, 1.0);
            }
        }
    }
}
