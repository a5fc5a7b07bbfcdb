//! Linear connectivity of image domains, close-to-convexity and the
//! univalence constants for sheared maps.

mod mesh;

pub use mesh::{
    build_image_mesh, connectivity_on_mesh, dijkstra, geodesic_length, linear_connectivity_estimate, ConnectivityEstimate, ImageMesh,
    COLLISION_EPS,
};

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::Analytic;
use crate::error::{HmapError, Result};
use crate::grid::{grid_argmax, GridSpec};
use crate::map::{HarmonicMap, NormalizedMap};
use crate::transforms::{rotation_harmonic, ShearedMap};
use crate::univalence::{injectivity_oracle, InjectivityWitness};

/// `(2/pi) sup |arg(F'/phi')|` over the grid, with the argument continued
/// along each radius from the centre. `phi` is checked for convexity via
/// `Re(1 + z phi''/phi') > 0`.
pub fn close_to_convex_alpha(f: &Analytic, phi: &Analytic, grid: &GridSpec) -> Result<f64> {
    grid.validate()?;
    let (worst, at) = grid_argmax(grid, |p| match phi.derivatives(p.z, 2) {
        Ok(d) if d[1].norm() > 0.0 => -(1.0 + p.z * d[2] / d[1]).re,
        _ => f64::INFINITY,
    });
    if worst >= 0.0 {
        if phi.derivative(1, at.z)?.norm() == 0.0 {
            return Err(HmapError::DegenerateDerivative(at.z));
        }
        return Err(HmapError::NotConvex(at.z));
    }
    let ratio = |z: Complex64| -> Result<Complex64> {
        let a = f.derivative(1, z)?;
        let b = phi.derivative(1, z)?;
        if a.norm() == 0.0 || b.norm() == 0.0 {
            return Err(HmapError::DegenerateDerivative(z));
        }
        Ok(a / b)
    };
    let centre = ratio(Complex64::new(0.0, 0.0))?;
    let start = centre.arg();
    let per_ray: Vec<f64> = (0..grid.n_angular)
        .into_par_iter()
        .map(|k| {
            let mut prev = centre;
            let mut arg = start;
            let mut sup = arg.abs();
            for ring in 1..grid.n_radial {
                let z = grid.point(grid.index(ring, k)).z;
                let cur = ratio(z)?;
                arg += (cur / prev).arg();
                if arg.abs() >= PI {
                    return Err(HmapError::ArgWrap(z));
                }
                sup = sup.max(arg.abs());
                prev = cur;
            }
            Ok(sup)
        })
        .collect::<Result<_>>()?;
    Ok(2.0 / PI * per_ray.into_iter().fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Part {
    I,
    II,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriterionConstants {
    pub alpha: f64,
    pub part: Part,
    /// `M1` for part I, `M3` for part II.
    pub m_in: f64,
    #[serde(rename = "M2")]
    pub m2: Option<f64>,
    #[serde(rename = "M4")]
    pub m4: Option<f64>,
    #[serde(rename = "K")]
    pub k: Option<f64>,
}

/// `M2 = 1/(c - M1 (1 + c))` for part I; `M4 = (1 + M3)/(c - M3 (2 + c))`
/// and `K = (1 + M3)/(1 - M3)` for part II, with `c = cos(alpha pi/2)`.
pub fn criterion_constants(alpha: f64, m: f64, part: Part) -> Result<CriterionConstants> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(HmapError::InadmissibleParameters(format!("alpha = {alpha} not in [0, 1)")));
    }
    if !(m >= 0.0 && m.is_finite()) {
        return Err(HmapError::InadmissibleParameters(format!("M = {m} must be non-negative")));
    }
    let c = (alpha * PI / 2.0).cos();
    let mut out = CriterionConstants {
        alpha,
        part,
        m_in: m,
        m2: None,
        m4: None,
        k: None,
    };
    match part {
        Part::I => {
            let limit = c / (1.0 + c);
            if m >= limit {
                return Err(HmapError::InadmissibleParameters(format!("M1 = {m} must be < cos(alpha pi/2)/(1 + cos(alpha pi/2)) = {limit}")));
            }
            out.m2 = Some(1.0 / (c - m * (1.0 + c)));
        }
        Part::II => {
            let limit = c / (2.0 + c);
            if m >= limit {
                return Err(HmapError::InadmissibleParameters(format!("M3 = {m} must be < cos(alpha pi/2)/(2 + cos(alpha pi/2)) = {limit}")));
            }
            out.m4 = Some((1.0 + m) / (c - m * (2.0 + c)));
            out.k = Some((1.0 + m) / (1.0 - m));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShearCriterionOptions {
    /// Resolution of the image meshes.
    pub mesh: GridSpec,
    /// Grid for the dilatation sup, the injectivity oracle and the ratio check.
    pub grid: GridSpec,
    pub n_pairs: usize,
    pub seed: u64,
    /// Allowance on `M_hat` for the upward bias of mesh geodesics.
    pub slack: f64,
    pub n_theta: usize,
}

impl Default for ShearCriterionOptions {
    fn default() -> Self {
        Self {
            mesh: GridSpec::new(64, 256, 0.999).expect("valid"),
            grid: GridSpec::new(32, 128, 0.999).expect("valid"),
            n_pairs: 64,
            seed: 0,
            slack: 1.10,
            n_theta: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShearCriterionReport {
    pub part: Part,
    pub alpha_hat: f64,
    /// Grid sup of `|omega|`, used as `M1` or `M3`.
    pub dilatation_sup: f64,
    pub constants: CriterionConstants,
    pub slack: f64,
    pub witness: Option<InjectivityWitness>,
    #[serde(rename = "M_hat")]
    pub m_hat: f64,
    pub m_bound: f64,
    /// Largest `Lambda/lambda` over the grid and all rotations (part II).
    pub ratio_max: Option<f64>,
    pub thetas: Vec<f64>,
    pub pass: bool,
}

/// Checks univalence and linear connectivity of `h` (part I) or of every
/// `f_theta = h + e^{i theta} conj(g)` (part II) against the constants of
/// [`criterion_constants`].
pub fn verify_shear_criterion(sheared: &ShearedMap, alpha_hat: f64, part: Part, opts: &ShearCriterionOptions) -> Result<ShearCriterionReport> {
    opts.grid.validate()?;
    let omega = &sheared.dilatation;
    let (dilatation_sup, _) = grid_argmax(&opts.grid, |p| omega.eval(p.z).norm());
    let constants = criterion_constants(alpha_hat, dilatation_sup, part)?;
    let map = &sheared.map;
    let (targets, thetas, m_bound): (Vec<HarmonicMap>, Vec<f64>, f64) = match part {
        Part::I => (
            vec![HarmonicMap::analytic(map.h().clone())],
            vec![],
            constants.m2.expect("part I"),
        ),
        Part::II => {
            let n = opts.n_theta.max(1);
            let thetas: Vec<f64> = (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect();
            (
                thetas.iter().map(|&t| rotation_harmonic(map, t)).collect(),
                thetas,
                constants.m4.expect("part II"),
            )
        }
    };
    let mut witness = None;
    let mut m_hat: f64 = 0.0;
    let mut ratio_max: Option<f64> = None;
    for t in &targets {
        if witness.is_none() {
            witness = injectivity_oracle(t, &opts.grid, None);
        }
        m_hat = m_hat.max(linear_connectivity_estimate(t, &opts.mesh, opts.n_pairs, opts.seed)?.m_hat);
        if part == Part::II {
            let (r, _) = grid_argmax(&opts.grid, |p| t.lambda_big(p.z) / t.lambda_small(p.z));
            ratio_max = Some(ratio_max.map_or(r, |m| m.max(r)));
        }
    }
    let ratio_ok = match (ratio_max, constants.k) {
        (Some(r), Some(k)) => r <= k * (1.0 + 1e-12),
        _ => true,
    };
    let pass = witness.is_none() && m_hat <= m_bound * opts.slack && ratio_ok;
    Ok(ShearCriterionReport {
        part,
        alpha_hat,
        dilatation_sup,
        constants,
        slack: opts.slack,
        witness,
        m_hat,
        m_bound,
        ratio_max,
        thetas,
        pass,
    })
}

/// Smallest exponent `c4` on one ray with
/// `Lambda(r xi) >= Lambda(rho xi) ((1 - r)/(1 - rho))^(c4 - 1) / 8`
/// for every sampled `rho < r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthExponentRow {
    pub theta: f64,
    pub c4_min: f64,
    pub rho: f64,
    pub r: f64,
}

pub fn growth_exponent_experiment(f: &NormalizedMap, grid: &GridSpec) -> Result<Vec<GrowthExponentRow>> {
    grid.validate()?;
    let map = f.map();
    let radii: Vec<f64> = (0..grid.n_radial).map(|j| grid.radius(j)).collect();
    Ok((0..grid.n_angular)
        .into_par_iter()
        .map(|k| {
            let theta = grid.angle(k);
            let xi = Complex64::from_polar(1.0, theta);
            let lam: Vec<f64> = radii.iter().map(|&r| map.lambda_big(xi * r)).collect();
            let mut row = GrowthExponentRow {
                theta,
                c4_min: f64::NEG_INFINITY,
                rho: 0.0,
                r: 0.0,
            };
            for i in 0..radii.len() {
                for j in (i + 1)..radii.len() {
                    let t = (1.0 - radii[j]) / (1.0 - radii[i]);
                    let c4 = 1.0 + (8.0 * lam[j] / lam[i]).ln() / t.ln();
                    if c4 > row.c4_min {
                        row.c4_min = c4;
                        row.rho = radii[i];
                        row.r = radii[j];
                    }
                }
            }
            row
        })
        .collect())
}
