//! Affine and linear invariance machinery: Koebe and affine transforms,
//! rotations of the co-analytic part, and the shear construction.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::Analytic;
use crate::error::{HmapError, Result};
use crate::grid::GridSpec;
use crate::map::{check_disk, HarmonicMap, NormalizedMap};
use crate::series::Series;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Default truncation order for series produced by transforms.
pub const DEFAULT_ORDER: usize = 24;

/// `phi(zeta) = (zeta + z0) / (1 + conj(z0) zeta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskAutomorphism {
    z0: Complex64,
}

impl DiskAutomorphism {
    pub fn new(z0: Complex64) -> Result<Self> {
        check_disk(z0)?;
        Ok(Self { z0 })
    }

    pub fn center(&self) -> Complex64 {
        self.z0
    }

    pub fn apply(&self, zeta: Complex64) -> Complex64 {
        (zeta + self.z0) / (ONE + self.z0.conj() * zeta)
    }

    /// `phi'(0) = 1 - |z0|^2`.
    pub fn derivative_at_origin(&self) -> f64 {
        1.0 - self.z0.norm_sqr()
    }

    pub fn series(&self, order: usize) -> Series {
        crate::series::automorphism_series(self.z0, order)
    }
}

fn polynomial_parts(f: &HarmonicMap, order: usize) -> Result<(Series, Series)> {
    match f.coefficients() {
        Some((h, g)) => Ok((h.clone(), g.clone())),
        None => Ok((f.h().taylor(order)?, f.g().taylor(order)?)),
    }
}

/// `F_mu = (f + mu conj(f)) / (1 + mu g'(0))`: analytic part
/// `(h + mu g) / D`, co-analytic part `(g + conj(mu) h) / conj(D)`.
pub fn affine_transform(f: &NormalizedMap, mu: Complex64) -> Result<NormalizedMap> {
    if !(mu.norm() < 1.0) {
        return Err(HmapError::Parameter(format!("|mu| = {} must be < 1", mu.norm())));
    }
    let map = f.map();
    let gp0 = map.g().derivative(1, ZERO)?;
    let denom = ONE + mu * gp0;
    if denom.norm() < 1e-14 {
        return Err(HmapError::SingularAffine);
    }
    let h = map.h().plus_scaled(mu, map.g()).scaled(ONE / denom);
    let g = map.g().plus_scaled(mu.conj(), map.h()).scaled(ONE / denom.conj());
    NormalizedMap::new(HarmonicMap::from_parts(h, g)?)
}

/// Truncated series of the Koebe transform
/// `K(z) = (f(phi(z)) - f(z0)) / (phi'(0) h'(z0))`.
///
/// Closed-form inputs are replaced by their Taylor polynomial of the same
/// order before composing.
pub fn koebe_transform(f: &NormalizedMap, z0: Complex64, order: usize) -> Result<NormalizedMap> {
    let phi = DiskAutomorphism::new(z0)?;
    let (h, g) = polynomial_parts(f.map(), order)?;
    let hp0 = h.derivative_at(1, z0);
    if hp0.norm() == 0.0 {
        return Err(HmapError::DegenerateDerivative(z0));
    }
    let denom = hp0 * phi.derivative_at_origin();
    let mut hc = h.compose_disk_automorphism(z0, order);
    let mut gc = g.compose_disk_automorphism(z0, order);
    hc.coeffs[0] = ZERO;
    gc.coeffs[0] = ZERO;
    let hk = hc.scale(ONE / denom);
    let gk = gc.scale(ONE / denom.conj());
    NormalizedMap::new(HarmonicMap::from_series(hk, gk)?)
}

/// `F_theta = h + e^{i theta} g`.
pub fn rotation_analytic(f: &HarmonicMap, theta: f64) -> Analytic {
    f.h().plus_scaled(Complex64::from_polar(1.0, theta), f.g())
}

/// `f_theta = h + e^{i theta} conj(g)`, i.e. co-analytic part `e^{-i theta} g`.
pub fn rotation_harmonic(f: &HarmonicMap, theta: f64) -> HarmonicMap {
    let g = f.g().scaled(Complex64::from_polar(1.0, -theta));
    HarmonicMap::from_parts(f.h().clone(), g).expect("rotation keeps g(0) = 0")
}

/// Output of [`shear`]: the map together with the data it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct ShearedMap {
    pub map: HarmonicMap,
    /// `F = h - g`.
    pub analytic_difference: Series,
    pub dilatation: Series,
    pub order: usize,
}

impl ShearedMap {
    pub fn h_series(&self) -> &Series {
        self.map.h().as_series().expect("shear produces series")
    }

    pub fn g_series(&self) -> &Series {
        self.map.g().as_series().expect("shear produces series")
    }

    pub fn normalized(&self) -> Result<NormalizedMap> {
        NormalizedMap::new(self.map.clone())
    }
}

/// Shear with the default detection grid.
pub fn shear(f: &Series, omega: &Series, order: usize) -> Result<ShearedMap> {
    shear_on(f, omega, order, &GridSpec::default())
}

/// Recovers `f = h + conj(g)` from `F = h - g` and `omega = g'/h'`:
/// `h' = F' / (1 - omega)`, `g' = omega h'`, integrated with `h(0) = g(0) = 0`.
///
/// Zeros of `1 - omega` (and points with `|omega| >= 1`) are detected by
/// sampling `grid`, not by root finding.
pub fn shear_on(f: &Series, omega: &Series, order: usize, grid: &GridSpec) -> Result<ShearedMap> {
    grid.validate()?;
    if order < 1 {
        return Err(HmapError::Parameter("shear order must be >= 1".into()));
    }
    let fp = f.derivative();
    if fp.coeff(0).norm() == 0.0 {
        return Err(HmapError::DegenerateDerivative(ZERO));
    }
    let bad = grid
        .par_points()
        .map(|p| (omega.eval(p.z), p.z))
        .filter(|(w, _)| !(w.norm() < 1.0) || (ONE - *w).norm() < 1e-12)
        .min_by(|a, b| a.1.norm().total_cmp(&b.1.norm()));
    if let Some((_, z)) = bad {
        return Err(HmapError::DegenerateDilatation(z));
    }
    let one_minus = Series::constant(ONE).sub(omega);
    let hp = fp.div_trunc(&one_minus, order - 1)?;
    let gp = omega.mul_trunc(&hp, order - 1);
    let map = HarmonicMap::from_series(hp.integral(), gp.integral())?;
    Ok(ShearedMap {
        map,
        analytic_difference: f.clone(),
        dilatation: omega.clone(),
        order,
    })
}

/// `A_2(zeta) = (1/2)(1 - |zeta|^2)(h'' + mu g'')/(h' + mu g') - conj(zeta)`.
pub fn second_coefficient_a2(f: &HarmonicMap, zeta: Complex64, mu: Complex64) -> Result<Complex64> {
    check_disk(zeta)?;
    if !(mu.norm() < 1.0) {
        return Err(HmapError::Parameter(format!("|mu| = {} must be < 1", mu.norm())));
    }
    let h = f.h().derivatives(zeta, 2)?;
    let g = f.g().derivatives(zeta, 2)?;
    a2_from(zeta, mu, h[1], h[2], g[1], g[2])
}

fn a2_from(zeta: Complex64, mu: Complex64, h1: Complex64, h2: Complex64, g1: Complex64, g2: Complex64) -> Result<Complex64> {
    let den = h1 + mu * g1;
    if den.norm() == 0.0 {
        return Err(HmapError::DegenerateDerivative(zeta));
    }
    Ok(0.5 * (1.0 - zeta.norm_sqr()) * (h2 + mu * g2) / den - zeta.conj())
}

/// Disk sample for the affine parameter `mu`: the origin plus
/// `n_radii x n_angles` points with radii up to `radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuGrid {
    pub n_radii: usize,
    pub n_angles: usize,
    pub radius: f64,
}

impl Default for MuGrid {
    fn default() -> Self {
        Self {
            n_radii: 8,
            n_angles: 16,
            radius: 0.95,
        }
    }
}

impl MuGrid {
    pub fn points(&self) -> Vec<Complex64> {
        let mut pts = vec![ZERO];
        for j in 1..=self.n_radii {
            let r = self.radius * j as f64 / self.n_radii as f64;
            for k in 0..self.n_angles {
                pts.push(Complex64::from_polar(r, 2.0 * std::f64::consts::PI * k as f64 / self.n_angles as f64));
            }
        }
        pts
    }
}

/// One `(zeta, mu, A_2)` sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct A2Sample {
    pub zeta: Complex64,
    pub mu: Complex64,
    pub a2: Complex64,
}

/// Sweep of `A_2` over `zeta` and `mu`. `samples` keeps the worst `mu` for
/// each `zeta`; `c1_hat` is the largest `|A_2|` seen, an under-estimate of
/// the true supremum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondCoefficientField {
    pub samples: Vec<A2Sample>,
    pub c1_hat: f64,
    pub witness: A2Sample,
}

pub fn estimate_c1(f: &HarmonicMap, grid: &GridSpec, mu_grid: &MuGrid) -> Result<SecondCoefficientField> {
    grid.validate()?;
    if !(mu_grid.radius < 1.0) {
        return Err(HmapError::Parameter("mu grid radius must be < 1".into()));
    }
    let mus = mu_grid.points();
    let samples: Vec<A2Sample> = grid
        .par_points()
        .map(|p| {
            let h = f.h().derivatives(p.z, 2)?;
            let g = f.g().derivatives(p.z, 2)?;
            let mut worst: Option<A2Sample> = None;
            for &mu in &mus {
                let a2 = a2_from(p.z, mu, h[1], h[2], g[1], g[2])?;
                if worst.is_none_or(|w| a2.norm() > w.a2.norm()) {
                    worst = Some(A2Sample { zeta: p.z, mu, a2 });
                }
            }
            Ok(worst.expect("mu grid is non-empty"))
        })
        .collect::<Result<_>>()?;
    let witness = samples
        .iter()
        .copied()
        .fold(samples[0], |best, s| if s.a2.norm() > best.a2.norm() { s } else { best });
    Ok(SecondCoefficientField {
        c1_hat: witness.a2.norm(),
        witness,
        samples,
    })
}
