//! One PASS/FAIL line per acceptance criterion. Exits nonzero on any failure.

use std::f64::consts::{FRAC_PI_2, PI};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use hmap_core::analytic::Analytic;
use hmap_core::bounds::{
    coefficient_bound_check, rhs_schwarz_pick_harmonic, rhs_thm_a, verify_colonna, BoundSource, VerifyOptions, MARGIN_TOL,
};
use hmap_core::connectivity::{close_to_convex_alpha, criterion_constants, linear_connectivity_estimate, verify_shear_criterion, Part, ShearCriterionOptions};
use hmap_core::falsify::{falsify, to_csv, FalsifyConfig};
use hmap_core::transforms::{affine_transform, koebe_transform, rotation_harmonic, shear};
use hmap_core::univalence::{injectivity_oracle, john_experiment, pre_schwarzian_norm, JohnFamily};
use hmap_core::{point_profile, ClosedForm, Complex64, GridSpec, HarmonicMap, NormalizedMap, Series};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit_s: f64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit_s, format!("took {:.2}s, limit {limit_s}s", elapsed.as_secs_f64()))
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn colonna_extremal() -> Outcome {
    let t = Instant::now();
    let f = HarmonicMap::closed_form(&ClosedForm::colonna(1.0)).map_err(err)?;
    let lhs = f.wirtinger_derivative(1, false, ZERO).map_err(err)?.norm() + f.wirtinger_derivative(1, true, ZERO).map_err(err)?.norm();
    let rhs = rhs_schwarz_pick_harmonic(1, 1.0, 0.0).map_err(err)?;
    ensure((lhs - 4.0 / PI).abs() <= 1e-9, format!("|f_z(0)| + |f_zbar(0)| = {lhs}"))?;
    ensure((lhs - rhs).abs() <= 1e-9, format!("rhs(1, 1, 0) = {rhs}"))?;
    let rep = verify_colonna(&f, &GridSpec::new(16, 64, 0.999).map_err(err)?, &VerifyOptions::default()).map_err(err)?;
    ensure(rep.pass && rep.worst_margin.abs() <= 1e-9, format!("colonna sweep worst margin {}", rep.worst_margin))?;
    within(t.elapsed(), 1.0)?;
    Ok(format!("lhs = {lhs:.12}, 4/pi = {:.12}, {:.3}s", 4.0 / PI, t.elapsed().as_secs_f64()))
}

fn coefficient_witness() -> Outcome {
    let f = HarmonicMap::closed_form(&ClosedForm::colonna(1.0)).map_err(err)?;
    let a1 = f.h().taylor(1).map_err(err)?.coeff(1);
    let b1 = f.g().taylor(1).map_err(err)?.coeff(1);
    let sum = a1.norm() + b1.norm();
    ensure((sum - 4.0 / PI).abs() <= 1e-9, format!("|a1| + |b1| = {sum}"))?;
    let rep = coefficient_bound_check(&f.to_polynomial(24).map_err(err)?, 1.0).map_err(err)?;
    ensure(rep.pass && rep.worst_index == 1, format!("coefficient check worst index {}", rep.worst_index))?;
    Ok(format!("|a1| + |b1| = {sum:.12}"))
}

fn falsifier() -> Outcome {
    let t = Instant::now();
    let config = FalsifyConfig::new(10_000, 0, GridSpec::new(32, 128, 0.999).map_err(err)?);
    let run = falsify(&config).map_err(err)?;
    let s = &run.summary;
    ensure(s.count == 10_000, format!("{} maps", s.count))?;
    ensure(s.errors == 0, format!("{} maps errored", s.errors))?;
    ensure(s.violations == 0, format!("{} violations, worst map {:?}", s.violations, s.worst_index))?;
    for (n, m) in s.min_derivative_sum.iter().enumerate() {
        ensure(*m >= -MARGIN_TOL, format!("thm1.1 n={} margin {m}", n + 1))?;
    }
    ensure(s.min_colonna >= -MARGIN_TOL, format!("colonna margin {}", s.min_colonna))?;
    ensure(s.min_lemma_a >= -MARGIN_TOL, format!("lemmaA margin {}", s.min_lemma_a))?;
    if let Some(b2) = s.min_b2 {
        ensure(b2 >= -MARGIN_TOL, format!("b2 margin {b2}"))?;
    }
    within(t.elapsed(), 120.0)?;
    Ok(format!(
        "10000 maps, min margins thm1.1 {:.3e} colonna {:.3e} lemmaA {:.3e} b2 {:.3e}, {:.1}s",
        s.min_derivative_sum.iter().copied().fold(f64::INFINITY, f64::min),
        s.min_colonna,
        s.min_lemma_a,
        s.min_b2.unwrap_or(f64::NAN),
        t.elapsed().as_secs_f64()
    ))
}

fn improvement_sweep() -> Outcome {
    let mut checked = 0usize;
    let mut min_gap = f64::INFINITY;
    for n in 1..=10 {
        for m in [0.5, 1.0, 3.0] {
            for k in 0..=999 {
                let r = k as f64 / 1000.0;
                let gap = 2.0 * rhs_thm_a(n, m, r).map_err(err)? - rhs_schwarz_pick_harmonic(n, m, r).map_err(err)?;
                // the quotient (2/pi)(1 - r)/(1 + r) stays below 1
                let ratio = rhs_schwarz_pick_harmonic(n, m, r).map_err(err)? / (2.0 * rhs_thm_a(n, m, r).map_err(err)?);
                ensure(gap >= 0.0 && ratio <= 2.0 / PI * (1.0 + 1e-15), format!("n={n} M={m} r={r}: gap {gap}"))?;
                min_gap = min_gap.min(gap / rhs_thm_a(n, m, r).map_err(err)?);
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} triples, min relative gap {min_gap:.6}"))
}

fn quadratic_extremal() -> Outcome {
    let t = Instant::now();
    let c = 0.6;
    let f = HarmonicMap::polynomial(vec![ZERO, ONE], vec![ZERO, Complex64::new(c / 2.0, 0.0)]).map_err(err)?;
    let b2 = f.coefficients().ok_or("not polynomial")?.1.coeff(2).norm();
    ensure(b2 == c / 2.0, format!("|b2| = {b2}"))?;
    let est = linear_connectivity_estimate(&f, &GridSpec::new(128, 512, 0.999).map_err(err)?, 64, 0).map_err(err)?;
    let bound = (1.0 + c) / (1.0 - c) * 1.10;
    ensure(est.m_hat <= bound, format!("M_hat = {} > {bound}", est.m_hat))?;
    ensure(est.m_hat >= 1.0 - 1e-9, format!("M_hat = {} < 1", est.m_hat))?;
    within(t.elapsed(), 30.0)?;
    Ok(format!("|b2| = {b2}, M_hat = {:.4} <= {bound:.2}, {:.1}s", est.m_hat, t.elapsed().as_secs_f64()))
}

fn shear_family() -> Outcome {
    let opts = ShearCriterionOptions::default();
    let big_f = Series::identity();
    let alpha = close_to_convex_alpha(&Analytic::identity(), &Analytic::identity(), &opts.grid).map_err(err)?;
    let mut lines = Vec::new();
    for m1 in [0.1, 0.2, 0.3, 0.45] {
        let s = shear(&big_f, &Series::from_real(&[0.0, m1]), 40).map_err(err)?;
        let rep = verify_shear_criterion(&s, alpha, Part::I, &opts).map_err(err)?;
        let m2 = 1.0 / (1.0 - 2.0 * m1);
        ensure((criterion_constants(0.0, m1, Part::I).map_err(err)?.m2.unwrap() - m2).abs() <= 1e-12, "M2 formula")?;
        ensure(rep.witness.is_none(), format!("M1={m1}: witness {:?}", rep.witness))?;
        ensure(rep.m_hat <= m2 * 1.10, format!("M1={m1}: M_hat {} > {}", rep.m_hat, m2 * 1.10))?;
        lines.push(format!("I M1={m1} M_hat={:.3}/{:.3}", rep.m_hat, m2 * 1.10));
    }
    for m3 in [0.1, 0.2, 0.3] {
        let s = shear(&big_f, &Series::from_real(&[0.0, m3]), 40).map_err(err)?;
        let k = (1.0 + m3) / (1.0 - m3);
        let mut worst: f64 = 0.0;
        for j in 0..8 {
            let f = rotation_harmonic(&s.map, 2.0 * PI * j as f64 / 8.0);
            for p in opts.grid.points() {
                let pr = point_profile(&f, p.z).map_err(err)?;
                worst = worst.max(pr.lambda_big / pr.lambda_small);
            }
        }
        ensure(worst <= k * (1.0 + 1e-12), format!("M3={m3}: ratio {worst} > K {k}"))?;
        let rep = verify_shear_criterion(&s, alpha, Part::II, &opts).map_err(err)?;
        ensure(rep.witness.is_none(), format!("M3={m3}: witness {:?}", rep.witness))?;
        lines.push(format!("II M3={m3} ratio={worst:.4}/{k:.4} M_hat={:.3}/{:.3}", rep.m_hat, rep.m_bound * rep.slack));
    }
    Ok(lines.join("; "))
}

fn john_soundness() -> Outcome {
    let family = JohnFamily::ExpLine {
        values: vec![0.25, 0.5, 0.785, 1.5, 2.5, 3.5],
    };
    let exp = john_experiment(&family, &GridSpec::default()).map_err(err)?;
    let s = &exp.summary;
    ensure(s.soundness_violations == 0, format!("{} certified rows with witnesses", s.soundness_violations))?;
    for row in &exp.rows {
        if let (Some(mu), Some(_)) = (row.mu_f, &row.witness) {
            ensure(mu > FRAC_PI_2.exp(), format!("collision at mu_f = {mu}"))?;
        }
    }
    let last = exp.rows.last().ok_or("empty experiment")?;
    let w = last.witness.as_ref().ok_or("no witness for a = 3.5")?;
    let period = 2.0 * PI / 3.5;
    let d = (w.z1 - w.z2).norm();
    ensure((d - period).abs() <= 0.02 * period, format!("|z1 - z2| = {d}, expected {period}"))?;
    Ok(format!(
        "{} certified, {} collisions, |z1 - z2| = {d:.5} vs {period:.5}; bracket e^(pi/2) = {:.4} <= gamma <= e^pi = {:.4}, smallest colliding mu_f = {:.4}",
        s.certified,
        s.collisions,
        s.lower_bracket,
        s.upper_bracket,
        s.min_mu_with_collision.unwrap_or(f64::NAN)
    ))
}

fn pre_schwarzian() -> Outcome {
    let f = Analytic::Mobius {
        a: ONE,
        b: ZERO,
        c: -ONE,
        d: ONE,
    };
    let norm = pre_schwarzian_norm(&f, &GridSpec::new(256, 1024, 0.9999).map_err(err)?).map_err(err)?;
    ensure((norm - 4.0).abs() <= 1e-3, format!("norm = {norm}"))?;
    Ok(format!("norm = {norm:.6}"))
}

fn random_map(rng: &mut ChaCha8Rng) -> HarmonicMap {
    let mut coeff = |s: f64| Complex64::new(rng.random_range(-s..s), rng.random_range(-s..s));
    let a = (0..6).map(|_| coeff(1.0)).collect();
    let b = (0..5).map(|_| coeff(1.0)).collect();
    HarmonicMap::polynomial(a, b).expect("valid polynomial")
}

fn random_normalized(rng: &mut ChaCha8Rng) -> NormalizedMap {
    let mut coeff = |s: f64| Complex64::new(rng.random_range(-s..s), rng.random_range(-s..s));
    let h = vec![ZERO, ONE, coeff(0.3), coeff(0.3), coeff(0.3)];
    let g = vec![ZERO, coeff(0.5), coeff(0.3), coeff(0.3)];
    NormalizedMap::new(HarmonicMap::from_series(Series::new(h), Series::new(g)).unwrap()).unwrap()
}

fn fd_wirtinger(u: &dyn Fn(Complex64) -> Complex64, z: Complex64, conjugated: bool) -> Complex64 {
    let h = 1e-5;
    let i = Complex64::new(0.0, 1.0);
    let dx = (u(z + h) - u(z - h)) / (2.0 * h);
    let dy = (u(z + i * h) - u(z - i * h)) / (2.0 * h);
    if conjugated {
        (dx + i * dy) * 0.5
    } else {
        (dx - i * dy) * 0.5
    }
}

fn property_checks() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let grid = GridSpec::new(8, 32, 0.999).map_err(err)?;
    let mut counts = [0usize; 6];
    for _ in 0..40 {
        let f = random_map(&mut rng);
        for p in grid.points() {
            let Ok(pr) = point_profile(&f, p.z) else { continue };
            if pr.jacobian >= 0.0 {
                let d = (pr.jacobian - pr.lambda_small * pr.lambda_big).abs();
                ensure(d <= 1e-12 * (1.0 + pr.jacobian.abs()), format!("J vs lambda Lambda at {}: {d}", p.z))?;
                counts[0] += 1;
            }
            if p.r <= 0.8 {
                for n in 1..=3 {
                    for conj in [false, true] {
                        let exact = f.wirtinger_derivative(n, conj, p.z).map_err(err)?;
                        let fd = if n == 1 {
                            fd_wirtinger(&|w| f.evaluate(w).unwrap(), p.z, conj)
                        } else {
                            fd_wirtinger(&|w| f.wirtinger_derivative(n - 1, conj, w).unwrap(), p.z, conj)
                        };
                        ensure((fd - exact).norm() <= 1e-6 * (1.0 + exact.norm()), format!("finite difference n={n} at {}", p.z))?;
                        counts[1] += 1;
                    }
                }
            }
        }
        for k in 0..16 {
            let rot = rotation_harmonic(&f, 2.0 * PI * k as f64 / 16.0);
            for p in grid.points() {
                let (Ok(a), Ok(b)) = (point_profile(&f, p.z), point_profile(&rot, p.z)) else { continue };
                ensure((a.omega.norm() - b.omega.norm()).abs() <= 1e-12 * (1.0 + a.omega.norm()), "rotation changes |omega|")?;
                counts[2] += 1;
            }
        }
    }
    let inner = GridSpec::new(16, 64, 0.9).map_err(err)?;
    for _ in 0..20 {
        let big_f = Series::new(vec![ZERO, ONE, Complex64::new(rng.random_range(-0.1..0.1), rng.random_range(-0.1..0.1))]);
        let omega = Series::new(vec![ZERO, Complex64::new(rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3))]);
        let s = shear(&big_f, &omega, 60).map_err(err)?;
        for p in inner.points() {
            let diff = s.map.h().eval(p.z) - s.map.g().eval(p.z) - big_f.eval(p.z);
            let w = point_profile(&s.map, p.z).map_err(err)?.omega - omega.eval(p.z);
            ensure(diff.norm() <= 1e-8 && w.norm() <= 1e-8, format!("shear round trip at {}", p.z))?;
            counts[3] += 1;
        }
    }
    for _ in 0..40 {
        let f = random_normalized(&mut rng);
        let mu = Complex64::from_polar(rng.random_range(0.0..0.9), rng.random_range(0.0..2.0 * PI));
        let z0 = Complex64::from_polar(rng.random_range(0.0..0.7), rng.random_range(0.0..2.0 * PI));
        let mut outputs = vec![koebe_transform(&f, z0, 24).map_err(err)?];
        if let Ok(t) = affine_transform(&f, mu) {
            outputs.push(t);
        }
        for t in outputs {
            let (h, g) = t.map().coefficients().ok_or("not polynomial")?;
            ensure(h.coeff(0) == ZERO && g.coeff(0) == ZERO && (h.coeff(1) - ONE).norm() <= 1e-12, "normalization lost")?;
            counts[4] += 1;
        }
        let (h0, g0) = f.map().coefficients().ok_or("not polynomial")?;
        for t in [affine_transform(&f, ZERO).map_err(err)?, koebe_transform(&f, ZERO, 24).map_err(err)?] {
            let (h, g) = t.map().coefficients().ok_or("not polynomial")?;
            for k in 0..24 {
                ensure((h.coeff(k) - h0.coeff(k)).norm() <= 1e-14 && (g.coeff(k) - g0.coeff(k)).norm() <= 1e-14, "transform at origin is not the identity")?;
            }
            counts[4] += 1;
        }
    }
    let config = FalsifyConfig::new(50, 3, grid);
    ensure(to_csv(&falsify(&config).map_err(err)?) == to_csv(&falsify(&config).map_err(err)?), "falsifier not deterministic")?;
    let f = random_map(&mut rng);
    let opts = VerifyOptions {
        bound: BoundSource::GridEstimate,
        ..VerifyOptions::default()
    };
    ensure(verify_colonna(&f, &grid, &opts).map_err(err)? == verify_colonna(&f, &grid, &opts).map_err(err)?, "verifier not deterministic")?;
    ensure(injectivity_oracle(&f, &grid, None) == injectivity_oracle(&f, &grid, None), "oracle not deterministic")?;
    counts[5] += 3;
    Ok(format!(
        "J = lambda Lambda {}, finite differences {}, rotation {}, shear {}, normalization {}, determinism {}",
        counts[0], counts[1], counts[2], counts[3], counts[4], counts[5]
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("colonna extremal sharp at the origin", colonna_extremal),
        ("coefficient equality witness", coefficient_witness),
        ("falsifier suite", falsifier),
        ("improvement sweep", improvement_sweep),
        ("quadratic extremal connectivity", quadratic_extremal),
        ("shear family univalence and connectivity", shear_family),
        ("John criterion soundness", john_soundness),
        ("pre-Schwarzian norm of z/(1-z)", pre_schwarzian),
        ("property checks", property_checks),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail}", k + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
