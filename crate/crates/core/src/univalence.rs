//! Univalence criteria: the pre-Schwarzian test, the harmonic John criterion,
//! a brute-force injectivity oracle and the John-constant experiment.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::sup_inf_lambda;
use crate::analytic::Analytic;
use crate::error::{HmapError, Result};
use crate::grid::{golden_section_max, grid_argmax, GridSpec};
use crate::map::{ClosedForm, HarmonicMap};
use crate::series::Series;

/// Slack on `(2/pi) log mu_f <= 1`.
pub const JOHN_TOL: f64 = 1e-12;

const REFINE_ITERS: usize = 60;

fn ratio_term(d1: Complex64, d2: Complex64, z: Complex64) -> Result<f64> {
    if d1.norm() == 0.0 {
        return Err(HmapError::DegenerateDerivative(z));
    }
    Ok((1.0 - z.norm_sqr()) * (d2 / d1).norm())
}

fn pre_schwarzian_term(f: &Analytic, z: Complex64) -> Result<f64> {
    let d = f.derivatives(z, 2)?;
    ratio_term(d[1], d[2], z)
}

/// `sup (1 - |z|^2) |F''/F'|` over the grid, refined by golden-section
/// searches along the worst ray (in `r`) and then around it (in `theta`).
pub fn pre_schwarzian_norm(f: &Analytic, grid: &GridSpec) -> Result<f64> {
    grid.validate()?;
    let values: Vec<f64> = grid
        .par_points()
        .map(|p| pre_schwarzian_term(f, p.z))
        .collect::<Result<_>>()?;
    let (best, at) = values
        .iter()
        .enumerate()
        .fold((f64::NEG_INFINITY, 0), |acc, (i, &v)| if v > acc.0 { (v, i) } else { acc });
    let p = grid.point(at);
    let term = |z: Complex64| pre_schwarzian_term(f, z).unwrap_or(f64::NEG_INFINITY);
    let lo = grid.radius(p.ring.saturating_sub(1));
    let hi = grid.radius((p.ring + 1).min(grid.n_radial - 1));
    let (r, vr) = golden_section_max(|r| term(Complex64::from_polar(r, p.theta)), lo, hi, REFINE_ITERS);
    let dt = grid.angular_step();
    let (_, vt) = golden_section_max(|t| term(Complex64::from_polar(r, t)), p.theta - dt, p.theta + dt, REFINE_ITERS);
    let norm = best.max(vr).max(vt);
    if !norm.is_finite() {
        return Err(HmapError::NonFinite("pre-Schwarzian norm"));
    }
    Ok(norm)
}

/// `pre_schwarzian_norm(F) <= 1`. A `true` is a grid-level univalence
/// certificate; `false` is inconclusive.
pub fn becker_certify(f: &Analytic, grid: &GridSpec) -> Result<bool> {
    Ok(pre_schwarzian_norm(f, grid)? <= 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JohnProfile {
    #[serde(rename = "M_f_hat")]
    pub m_big: f64,
    #[serde(rename = "m_f_hat")]
    pub m_small: f64,
    pub mu_f: f64,
    /// `(2/pi) log mu_f`
    pub criterion_value: f64,
    pub certified: bool,
}

impl JohnProfile {
    pub fn from_lambda(m_big: f64, m_small: f64) -> Result<Self> {
        if !(m_small > 0.0) {
            return Err(HmapError::DegenerateMap);
        }
        let mu_f = m_big / m_small;
        let criterion_value = 2.0 / PI * mu_f.ln();
        Ok(Self {
            m_big,
            m_small,
            mu_f,
            criterion_value,
            certified: criterion_value <= 1.0 + JOHN_TOL,
        })
    }
}

/// The John criterion `mu_f <= e^{pi/2}` from grid estimates of
/// `sup Lambda_f` and `inf lambda_f`.
pub fn john_certify(f: &HarmonicMap, grid: &GridSpec) -> Result<JohnProfile> {
    grid.validate()?;
    let (jmin, at) = grid_argmax(grid, |p| {
        let (hp, gp) = f.first_derivatives(p.z);
        -(hp.norm_sqr() - gp.norm_sqr())
    });
    if -jmin < 0.0 {
        return Err(HmapError::NotSensePreserving(at.z));
    }
    let (big, small) = sup_inf_lambda(f, grid)?;
    JohnProfile::from_lambda(big, small)
}

/// Worst `(1 - |z|^2) |H_theta'(z)|` against `(2/pi) log(M_f/m_f)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaSweep {
    pub lhs_max: f64,
    pub bound: f64,
    pub margin: f64,
    pub worst_theta: f64,
    pub worst_z: Complex64,
}

/// Sweeps `H_theta' = (h'' + e^{i theta} g'') / (h' + e^{i theta} g')` over
/// `theta = 2 pi k / n_theta` and the grid.
pub fn theta_sweep_h_bound(f: &HarmonicMap, grid: &GridSpec, n_theta: usize) -> Result<ThetaSweep> {
    grid.validate()?;
    if n_theta == 0 {
        return Err(HmapError::Parameter("n_theta must be positive".into()));
    }
    let (big, small) = sup_inf_lambda(f, grid)?;
    if !(small > 0.0) {
        return Err(HmapError::DegenerateMap);
    }
    let bound = 2.0 / PI * (big / small).ln();
    let per_point: Vec<(f64, f64, Complex64)> = grid
        .par_points()
        .map(|p| {
            let dh = f.h().derivatives(p.z, 2)?;
            let dg = f.g().derivatives(p.z, 2)?;
            let mut worst = (f64::NEG_INFINITY, 0.0, p.z);
            for k in 0..n_theta {
                let theta = 2.0 * PI * k as f64 / n_theta as f64;
                let e = Complex64::from_polar(1.0, theta);
                let v = ratio_term(dh[1] + e * dg[1], dh[2] + e * dg[2], p.z)?;
                if v > worst.0 {
                    worst = (v, theta, p.z);
                }
            }
            Ok(worst)
        })
        .collect::<Result<_>>()?;
    let worst = per_point
        .iter()
        .copied()
        .fold(per_point[0], |a, b| if b.0 > a.0 { b } else { a });
    Ok(ThetaSweep {
        lhs_max: worst.0,
        bound,
        margin: bound - worst.0,
        worst_theta: worst.1,
        worst_z: worst.2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InjectivityWitness {
    pub z1: Complex64,
    pub z2: Complex64,
    pub image_distance: f64,
}

/// Half the smallest image distance between radial or angular grid
/// neighbours, floored at `1e-7`.
pub fn default_collision_tol(f: &HarmonicMap, grid: &GridSpec) -> f64 {
    let min = (1..grid.len())
        .into_par_iter()
        .map(|i| {
            let p = grid.point(i);
            let w = f.evaluate_unchecked(p.z);
            let inner = grid.index(p.ring - 1, p.spoke);
            let next = grid.index(p.ring, p.spoke + 1);
            let a = (w - f.evaluate_unchecked(grid.point(inner).z)).norm();
            let b = (w - f.evaluate_unchecked(grid.point(next).z)).norm();
            let m = a.min(b);
            if m.is_finite() {
                m
            } else {
                f64::INFINITY
            }
        })
        .reduce(|| f64::INFINITY, f64::min);
    (0.5 * min).max(1e-7)
}

/// Solves `f(z) = target` by Newton steps on the real 2x2 system
/// `h' d + conj(g') conj(d) = target - f(z)`.
fn solve_preimage(f: &HarmonicMap, target: Complex64, start: Complex64, r_max: f64) -> Option<Complex64> {
    let mut z = start;
    for _ in 0..50 {
        let res = target - f.evaluate_unchecked(z);
        let (hp, gp) = f.first_derivatives(z);
        let b = gp.conj();
        let jac = hp.norm_sqr() - b.norm_sqr();
        if jac.abs() < 1e-300 || !jac.is_finite() {
            return None;
        }
        let step = (hp.conj() * res - b * res.conj()) / jac;
        z += step;
        if !z.is_finite() || z.norm() > r_max {
            return None;
        }
        if step.norm() <= 1e-15 * (1.0 + z.norm()) {
            break;
        }
    }
    Some(z)
}

/// Pairs of grid points with distinct preimages whose images are close are
/// refined by solving `f(z2) = f(z1)` from the second point; a witness is
/// reported when the refined pair stays in the sampled disk, is at least one
/// grid spacing apart and its images agree within `collision_tol`.
///
/// Among all witnesses the one with the smallest image distance (then the
/// smallest grid indices) is returned, so the result is deterministic.
pub fn injectivity_oracle(f: &HarmonicMap, grid: &GridSpec, collision_tol: Option<f64>) -> Option<InjectivityWitness> {
    if grid.validate().is_err() {
        return None;
    }
    let tol = collision_tol.unwrap_or_else(|| default_collision_tol(f, grid));
    let spacing = grid.spacing();
    let pts: Vec<Complex64> = grid.points().map(|p| p.z).collect();
    let images: Vec<Complex64> = pts.par_iter().map(|&z| f.evaluate_unchecked(z)).collect();
    // image-space reach of one grid step
    let reach: Vec<f64> = pts
        .par_iter()
        .map(|&z| 1.5 * f.lambda_big(z) * spacing + tol)
        .collect();
    let cell = reach
        .iter()
        .copied()
        .filter(|r| r.is_finite())
        .fold(0.0, f64::max);
    if !(cell > 0.0) {
        return None;
    }
    let key = |w: Complex64| ((w.re / cell).floor() as i64, (w.im / cell).floor() as i64);
    let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, w) in images.iter().enumerate() {
        if w.is_finite() {
            buckets.entry(key(*w)).or_default().push(i);
        }
    }
    let found: Vec<(f64, usize, usize, InjectivityWitness)> = (0..pts.len())
        .into_par_iter()
        .filter_map(|i| {
            let w = images[i];
            if !w.is_finite() || !reach[i].is_finite() {
                return None;
            }
            let (kx, ky) = key(w);
            let mut best: Option<(f64, usize, usize, InjectivityWitness)> = None;
            for dx in -2..=2 {
                for dy in -2..=2 {
                    let Some(list) = buckets.get(&(kx + dx, ky + dy)) else {
                        continue;
                    };
                    for &j in list {
                        if j <= i || (pts[i] - pts[j]).norm() < spacing {
                            continue;
                        }
                        if (w - images[j]).norm() > reach[i] + reach[j] {
                            continue;
                        }
                        let Some(z2) = solve_preimage(f, w, pts[j], grid.r_max) else {
                            continue;
                        };
                        if (pts[i] - z2).norm() < spacing {
                            continue;
                        }
                        let d = (w - f.evaluate_unchecked(z2)).norm();
                        if d > tol {
                            continue;
                        }
                        let cand = (
                            d,
                            i,
                            j,
                            InjectivityWitness {
                                z1: pts[i],
                                z2,
                                image_distance: d,
                            },
                        );
                        if best.as_ref().is_none_or(|b| (d, j) < (b.0, b.2)) {
                            best = Some(cand);
                        }
                    }
                }
            }
            best
        })
        .collect();
    found
        .into_iter()
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)))
        .map(|c| c.3)
}

/// Parameterized families for the John-constant experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum JohnFamily {
    /// `exp(a z)` for each `a`.
    ExpLine { values: Vec<f64> },
    /// `z + b conj(z^2)` for each `b`.
    QuadraticConj { values: Vec<Complex64> },
}

impl JohnFamily {
    /// `start, start + step, ...` up to `stop` inclusive.
    pub fn exp_line_range(start: f64, stop: f64, step: f64) -> Result<Self> {
        Ok(JohnFamily::ExpLine {
            values: inclusive_range(start, stop, step)?,
        })
    }

    pub fn quadratic_conj_range(start: f64, stop: f64, step: f64) -> Result<Self> {
        Ok(JohnFamily::QuadraticConj {
            values: inclusive_range(start, stop, step)?
                .into_iter()
                .map(|b| Complex64::new(b, 0.0))
                .collect(),
        })
    }

    pub fn len(&self) -> usize {
        match self {
            JohnFamily::ExpLine { values } => values.len(),
            JohnFamily::QuadraticConj { values } => values.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn member(&self, k: usize) -> (Vec<f64>, Result<HarmonicMap>) {
        match self {
            JohnFamily::ExpLine { values } => {
                let a = values[k];
                (vec![a], HarmonicMap::closed_form(&ClosedForm::exp_line(a)))
            }
            JohnFamily::QuadraticConj { values } => {
                let b = values[k];
                let map = HarmonicMap::from_series(Series::identity(), Series::new(vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), b]));
                (vec![b.re, b.im], map)
            }
        }
    }
}

fn inclusive_range(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && start.is_finite() && stop.is_finite()) {
        return Err(HmapError::Parameter(format!("bad range {start}..{stop} step {step}")));
    }
    let n = ((stop - start) / step + 1e-9).floor();
    if n < 0.0 {
        return Ok(Vec::new());
    }
    Ok((0..=n as usize).map(|k| start + step * k as f64).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JohnRow {
    pub params: Vec<f64>,
    pub mu_f: Option<f64>,
    pub criterion_value: Option<f64>,
    pub certified: Option<bool>,
    pub witness: Option<InjectivityWitness>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JohnSummary {
    pub rows: usize,
    pub certified: usize,
    pub collisions: usize,
    /// Certified rows that nevertheless have a witness; must be zero.
    pub soundness_violations: usize,
    /// Smallest `mu_f` among rows with a collision, an upper specimen for the
    /// John constant at grid scale.
    pub min_mu_with_collision: Option<f64>,
    pub lower_bracket: f64,
    pub upper_bracket: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JohnExperiment {
    pub rows: Vec<JohnRow>,
    pub summary: JohnSummary,
}

/// Runs [`john_certify`] and [`injectivity_oracle`] on every member of the
/// family. Per-row failures are recorded in the row.
pub fn john_experiment(family: &JohnFamily, grid: &GridSpec) -> Result<JohnExperiment> {
    grid.validate()?;
    let rows: Vec<JohnRow> = (0..family.len())
        .map(|k| {
            let (params, map) = family.member(k);
            let map = match map {
                Ok(m) => m,
                Err(e) => {
                    return JohnRow {
                        params,
                        mu_f: None,
                        criterion_value: None,
                        certified: None,
                        witness: None,
                        error: Some(e.to_string()),
                    }
                }
            };
            let profile = john_certify(&map, grid);
            let witness = injectivity_oracle(&map, grid, None);
            let (mu_f, criterion_value, certified, error) = match profile {
                Ok(p) => (Some(p.mu_f), Some(p.criterion_value), Some(p.certified), None),
                Err(e) => (None, None, None, Some(e.to_string())),
            };
            JohnRow {
                params,
                mu_f,
                criterion_value,
                certified,
                witness,
                error,
            }
        })
        .collect();
    let summary = JohnSummary {
        rows: rows.len(),
        certified: rows.iter().filter(|r| r.certified == Some(true)).count(),
        collisions: rows.iter().filter(|r| r.witness.is_some()).count(),
        soundness_violations: rows
            .iter()
            .filter(|r| r.certified == Some(true) && r.witness.is_some())
            .count(),
        min_mu_with_collision: rows
            .iter()
            .filter(|r| r.witness.is_some())
            .filter_map(|r| r.mu_f)
            .min_by(f64::total_cmp),
        lower_bracket: FRAC_PI_2.exp(),
        upper_bracket: PI.exp(),
    };
    Ok(JohnExperiment { rows, summary })
}
