use std::f64::consts::PI;

use hmap_core::bounds::{
    rhs_colonna, rhs_ruscheweyh, rhs_schwarz, rhs_schwarz_pick_harmonic, rhs_szasz, rhs_thm_a, verify_derivative_sums, VerifyOptions,
};
use hmap_core::connectivity::linear_connectivity_estimate;
use hmap_core::falsify::{falsify, to_csv, FalsifyConfig};
use hmap_core::transforms::{affine_transform, koebe_transform, rotation_harmonic, shear};
use hmap_core::{point_profile, sup_modulus, Complex64, GridSpec, HarmonicMap, NormalizedMap, Series};
use proptest::prelude::*;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn complex(scale: f64) -> impl Strategy<Value = Complex64> {
    (-scale..scale, -scale..scale).prop_map(|(re, im)| Complex64::new(re, im))
}

fn disk_point(radius: f64) -> impl Strategy<Value = Complex64> {
    (0.0..radius, 0.0..2.0 * PI).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

/// `a` from index 0, `b` from index 1, degree up to 6.
fn polynomial_map() -> impl Strategy<Value = HarmonicMap> {
    (prop::collection::vec(complex(1.0), 2..=7), prop::collection::vec(complex(1.0), 1..=6))
        .prop_map(|(a, b)| HarmonicMap::polynomial(a, b).unwrap())
}

/// `z + sum_{k>=2} a_k z^k + conj(sum_{k>=1} b_k z^k)`, `|b_1| < 1`.
fn normalized_map() -> impl Strategy<Value = NormalizedMap> {
    (prop::collection::vec(complex(0.3), 0..=4), complex(0.5), prop::collection::vec(complex(0.3), 0..=4)).prop_map(|(a, b1, b)| {
        let mut h = vec![ZERO, ONE];
        h.extend(a);
        let mut g = vec![ZERO, b1];
        g.extend(b);
        NormalizedMap::new(HarmonicMap::from_series(Series::new(h), Series::new(g)).unwrap()).unwrap()
    })
}

fn small_grid() -> GridSpec {
    GridSpec::new(8, 32, 0.999).unwrap()
}

/// Central difference of `u` along `dir`.
fn directional(u: &dyn Fn(Complex64) -> Complex64, z: Complex64, dir: Complex64, step: f64) -> Complex64 {
    (u(z + dir * step) - u(z - dir * step)) / (2.0 * step)
}

/// `d/dz = (d/dx - i d/dy)/2`, `d/dzbar = (d/dx + i d/dy)/2`.
fn wirtinger_fd(u: &dyn Fn(Complex64) -> Complex64, z: Complex64, conjugated: bool) -> Complex64 {
    const STEP: f64 = 1e-5;
    let i = Complex64::new(0.0, 1.0);
    let dx = directional(u, z, ONE, STEP);
    let dy = directional(u, z, i, STEP);
    if conjugated {
        (dx + i * dy) * 0.5
    } else {
        (dx - i * dy) * 0.5
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn jacobian_is_lambda_product(f in polynomial_map(), z in disk_point(0.999)) {
        let p = match point_profile(&f, z) {
            Ok(p) => p,
            Err(_) => return Ok(()),
        };
        if p.jacobian >= 0.0 {
            prop_assert!((p.jacobian - p.lambda_small * p.lambda_big).abs() <= 1e-12 * (1.0 + p.jacobian.abs()));
        }
    }

    #[test]
    fn wirtinger_derivatives_match_finite_differences(f in polynomial_map(), z in disk_point(0.8), n in 1usize..=3, conjugated in any::<bool>()) {
        let exact = f.wirtinger_derivative(n, conjugated, z).unwrap();
        let fd = if n == 1 {
            wirtinger_fd(&|w| f.evaluate(w).unwrap(), z, conjugated)
        } else {
            wirtinger_fd(&|w| f.wirtinger_derivative(n - 1, conjugated, w).unwrap(), z, conjugated)
        };
        prop_assert!((fd - exact).norm() <= 1e-6 * (1.0 + exact.norm()), "n={} fd={} exact={}", n, fd, exact);
    }

    #[test]
    fn lambda_order_and_max_characterization(f in polynomial_map(), z in disk_point(0.999)) {
        let big = f.lambda_big(z);
        let small = f.lambda_small(z);
        prop_assert!(big >= small && small >= 0.0);

        let fz = f.wirtinger_derivative(1, false, z).unwrap();
        let fzbar = f.wirtinger_derivative(1, true, z).unwrap();
        let sample = |k: usize| -> f64 {
            (0..k)
                .map(|j| {
                    let t = 2.0 * PI * j as f64 / k as f64;
                    (fz + Complex64::from_polar(1.0, -2.0 * t) * fzbar).norm()
                })
                .fold(0.0, f64::max)
        };
        let mut prev = 0.0;
        for k in [4usize, 16, 64, 256, 1024] {
            let m = sample(k);
            prop_assert!(m <= big * (1.0 + 1e-12) + 1e-15);
            prop_assert!(m >= prev * (1.0 - 1e-12));
            prev = m;
        }
        // sampling error of a max of |a + b e^{i phi}| is O(step^2)
        prop_assert!(big - prev <= big * 1e-4 + 1e-14);
    }

    #[test]
    fn rotation_keeps_dilatation_modulus(f in polynomial_map()) {
        let grid = small_grid();
        for k in 0..16 {
            let theta = 2.0 * PI * k as f64 / 16.0;
            let rot = rotation_harmonic(&f, theta);
            for p in grid.points() {
                let (Ok(a), Ok(b)) = (point_profile(&f, p.z), point_profile(&rot, p.z)) else { continue };
                prop_assert!((a.omega.norm() - b.omega.norm()).abs() <= 1e-12 * (1.0 + a.omega.norm()));
            }
        }
    }

    #[test]
    fn transforms_preserve_normalization(f in normalized_map(), mu in disk_point(0.9), z0 in disk_point(0.7)) {
        if let Ok(t) = affine_transform(&f, mu) {
            let (h, g) = t.map().coefficients().unwrap();
            prop_assert_eq!(h.coeff(0), ZERO);
            prop_assert_eq!(g.coeff(0), ZERO);
            prop_assert!((h.coeff(1) - ONE).norm() <= 1e-12);
        }
        let k = koebe_transform(&f, z0, 24).unwrap();
        let (h, g) = k.map().coefficients().unwrap();
        prop_assert_eq!(h.coeff(0), ZERO);
        prop_assert_eq!(g.coeff(0), ZERO);
        prop_assert!((h.coeff(1) - ONE).norm() <= 1e-12);
    }

    #[test]
    fn transforms_at_origin_are_identities(f in normalized_map()) {
        let (h0, g0) = f.map().coefficients().unwrap();
        for t in [affine_transform(&f, ZERO).unwrap(), koebe_transform(&f, ZERO, 24).unwrap()] {
            let (h, g) = t.map().coefficients().unwrap();
            for k in 0..24 {
                prop_assert!((h.coeff(k) - h0.coeff(k)).norm() <= 1e-14);
                prop_assert!((g.coeff(k) - g0.coeff(k)).norm() <= 1e-14);
            }
        }
    }

    #[test]
    fn shear_round_trip(a in prop::collection::vec(complex(0.08), 0..=3), w in prop::collection::vec(complex(0.25), 1..=2)) {
        let mut fc = vec![ZERO, ONE];
        fc.extend(a);
        let big_f = Series::new(fc);
        let mut wc = vec![ZERO];
        wc.extend(w);
        let omega = Series::new(wc);
        let s = shear(&big_f, &omega, 60).unwrap();
        let grid = GridSpec::new(16, 64, 0.9).unwrap();
        for p in grid.points() {
            let hz = s.map.h().eval(p.z);
            let gz = s.map.g().eval(p.z);
            prop_assert!((hz - gz - big_f.eval(p.z)).norm() <= 1e-8);
            let prof = point_profile(&s.map, p.z).unwrap();
            prop_assert!((prof.omega - omega.eval(p.z)).norm() <= 1e-8);
        }
    }

    #[test]
    fn rhs_improvement_and_monotonicity(n in 1usize..=10, m in 0.01f64..10.0, r in 0.0f64..0.999, dr in 0.0f64..0.0009, dm in 0.0f64..1.0) {
        prop_assert!(2.0 * rhs_thm_a(n, m, r).unwrap() - rhs_schwarz_pick_harmonic(n, m, r).unwrap() >= 0.0);
        let r2 = r + dr;
        let m2 = m + dm;
        prop_assert!(rhs_schwarz_pick_harmonic(n, m, r2).unwrap() >= rhs_schwarz_pick_harmonic(n, m, r).unwrap());
        prop_assert!(rhs_schwarz_pick_harmonic(n, m2, r).unwrap() >= rhs_schwarz_pick_harmonic(n, m, r).unwrap());
        prop_assert!(rhs_thm_a(n, m, r2).unwrap() >= rhs_thm_a(n, m, r).unwrap());
        prop_assert!(rhs_thm_a(n, m2, r).unwrap() >= rhs_thm_a(n, m, r).unwrap());
        prop_assert!(rhs_colonna(m, r2).unwrap() >= rhs_colonna(m, r).unwrap());
        prop_assert!(rhs_colonna(m2, r).unwrap() >= rhs_colonna(m, r).unwrap());
        let w = m / (m + 1.0);
        prop_assert!(rhs_ruscheweyh(n, w, r2).unwrap() >= rhs_ruscheweyh(n, w, r).unwrap());
        prop_assert!(rhs_schwarz(w, r2).unwrap() >= rhs_schwarz(w, r).unwrap());
        prop_assert!(rhs_szasz(n, r2).unwrap() >= rhs_szasz(n, r).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sup_modulus_monotone(f in polynomial_map(), r1 in 0.3f64..0.99, dr in 0.0f64..0.009) {
        let lo = sup_modulus(&f, &GridSpec::new(16, 64, r1).unwrap()).unwrap();
        let hi = sup_modulus(&f, &GridSpec::new(16, 64, r1 + dr).unwrap()).unwrap();
        prop_assert!(hi >= lo * (1.0 - 1e-12), "r_max {} -> {}: {} > {}", r1, r1 + dr, lo, hi);

        let coarse = sup_modulus(&f, &GridSpec::new(16, 64, r1).unwrap()).unwrap();
        let fine = sup_modulus(&f, &GridSpec::new(32, 128, r1).unwrap()).unwrap();
        prop_assert!(fine >= coarse * (1.0 - 1e-12), "{} > {}", coarse, fine);
    }
}

#[test]
fn falsifier_is_deterministic() {
    let config = FalsifyConfig::new(24, 7, small_grid());
    let a = falsify(&config).unwrap();
    let b = falsify(&config).unwrap();
    assert_eq!(to_csv(&a), to_csv(&b));
    assert_eq!(serde_json::to_string(&a.summary).unwrap(), serde_json::to_string(&b.summary).unwrap());
}

#[test]
fn bounds_and_connectivity_are_deterministic() {
    let f = HarmonicMap::polynomial(vec![ZERO, ONE, Complex64::new(0.1, 0.2)], vec![ZERO, Complex64::new(0.0, 0.3)]).unwrap();
    let grid = GridSpec::new(16, 64, 0.999).unwrap();
    let opts = VerifyOptions::default();
    let a = verify_derivative_sums(&f, 5, &grid, &opts).unwrap();
    let b = verify_derivative_sums(&f, 5, &grid, &opts).unwrap();
    assert_eq!(a, b);
    let res = GridSpec::new(16, 64, 0.999).unwrap();
    let c1 = linear_connectivity_estimate(&f, &res, 16, 3).unwrap();
    let c2 = linear_connectivity_estimate(&f, &res, 16, 3).unwrap();
    assert_eq!(c1, c2);
}
