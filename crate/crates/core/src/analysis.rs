//! Pointwise quantities of a harmonic map and their grid extrema.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HmapError, Result};
use crate::grid::{golden_section_max, grid_argmax, grid_argmin, GridSpec};
use crate::map::{check_disk, HarmonicMap};

/// First-order data of `f` at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointProfile {
    pub z: Complex64,
    pub hp: Complex64,
    pub gp: Complex64,
    pub omega: Complex64,
    pub jacobian: f64,
    pub lambda_big: f64,
    pub lambda_small: f64,
}

pub fn point_profile(f: &HarmonicMap, z: Complex64) -> Result<PointProfile> {
    check_disk(z)?;
    let hp = f.h().derivative(1, z)?;
    let gp = f.g().derivative(1, z)?;
    if hp.norm() == 0.0 {
        return Err(HmapError::DegenerateDerivative(z));
    }
    let (a, b) = (hp.norm(), gp.norm());
    Ok(PointProfile {
        z,
        hp,
        gp,
        omega: gp / hp,
        jacobian: hp.norm_sqr() - gp.norm_sqr(),
        lambda_big: a + b,
        lambda_small: (a - b).abs(),
    })
}

/// Golden-section iterations used by every refinement pass.
const REFINE_ITERS: usize = 60;

/// Grid estimate of `sup |f|`: grid maximum plus a golden-section pass in
/// `theta` along the circle `r = r_max`. A lower estimate of the true supremum.
pub fn sup_modulus(f: &HarmonicMap, grid: &GridSpec) -> Result<f64> {
    sup_of(f, grid, |w| w.norm())
}

/// Grid estimate of `sup |Re f|`, refined like [`sup_modulus`].
pub fn sup_re_modulus(f: &HarmonicMap, grid: &GridSpec) -> Result<f64> {
    sup_of(f, grid, |w| w.re.abs())
}

fn sup_of(f: &HarmonicMap, grid: &GridSpec, measure: impl Fn(Complex64) -> f64 + Sync) -> Result<f64> {
    grid.validate()?;
    let value = |z: Complex64| measure(f.evaluate_unchecked(z));
    let (best, _) = grid_argmax(grid, |p| value(p.z));
    // best angle on the outer circle
    let outer = grid.n_radial - 1;
    let (_, spoke) = (0..grid.n_angular)
        .map(|k| (value(grid.point(grid.index(outer, k)).z), k))
        .fold((f64::NEG_INFINITY, 0), |acc, c| if c.0 > acc.0 { c } else { acc });
    let theta0 = grid.angle(spoke);
    let dt = grid.angular_step();
    let (_, refined) = golden_section_max(
        |t| value(Complex64::from_polar(grid.r_max, t)),
        theta0 - dt,
        theta0 + dt,
        REFINE_ITERS,
    );
    let sup = best.max(refined);
    if !sup.is_finite() {
        return Err(HmapError::NonFinite("sup estimate"));
    }
    Ok(sup)
}

/// How `m_f` is estimated from `lambda_f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaMode {
    /// `m_f = inf lambda_f`, the quantity the John criterion needs.
    #[default]
    Infimum,
    /// `m_f = sup lambda_f`, as literally written in the definition.
    LiteralSup,
}

/// `(M_f_hat, m_f_hat)`: grid maximum of `Lambda_f` and grid minimum of `lambda_f`.
pub fn sup_inf_lambda(f: &HarmonicMap, grid: &GridSpec) -> Result<(f64, f64)> {
    sup_inf_lambda_with(f, grid, LambdaMode::Infimum)
}

pub fn sup_inf_lambda_with(f: &HarmonicMap, grid: &GridSpec, mode: LambdaMode) -> Result<(f64, f64)> {
    grid.validate()?;
    if f.is_constant() {
        return Err(HmapError::DegenerateMap);
    }
    let (big, _) = grid_argmax(grid, |p| f.lambda_big(p.z));
    if big == 0.0 {
        return Err(HmapError::DegenerateMap);
    }
    let small = match mode {
        LambdaMode::Infimum => grid_argmin(grid, |p| f.lambda_small(p.z)).0,
        LambdaMode::LiteralSup => grid_argmax(grid, |p| f.lambda_small(p.z)).0,
    };
    if !(big.is_finite() && small.is_finite()) {
        return Err(HmapError::NonFinite("lambda sweep"));
    }
    Ok((big, small))
}
