//! Polar sampling of the open unit disk.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HmapError, Result};

pub const DEFAULT_R_MAX: f64 = 0.999;
pub const DEFAULT_N_RADIAL: usize = 64;
pub const DEFAULT_N_ANGULAR: usize = 256;

/// Radii `r_j = r_max * j / (n_radial - 1)`, `j = 0..n_radial`, and angles
/// `theta_k = 2 pi k / n_angular`. The origin is visited once.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_radial: usize,
    pub n_angular: usize,
    pub r_max: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            n_radial: DEFAULT_N_RADIAL,
            n_angular: DEFAULT_N_ANGULAR,
            r_max: DEFAULT_R_MAX,
        }
    }
}

/// One sample of the disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub ring: usize,
    pub spoke: usize,
    pub r: f64,
    pub theta: f64,
    pub z: Complex64,
}

impl GridSpec {
    pub fn new(n_radial: usize, n_angular: usize, r_max: f64) -> Result<Self> {
        let g = Self {
            n_radial,
            n_angular,
            r_max,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_radial < 2 {
            return Err(HmapError::InvalidGrid(format!("n_radial = {} < 2", self.n_radial)));
        }
        if self.n_angular < 8 {
            return Err(HmapError::InvalidGrid(format!("n_angular = {} < 8", self.n_angular)));
        }
        if !(self.r_max > 0.0 && self.r_max < 1.0) {
            return Err(HmapError::InvalidGrid(format!("r_max = {} not in (0, 1)", self.r_max)));
        }
        Ok(())
    }

    pub fn with_r_max(self, r_max: f64) -> Self {
        Self { r_max, ..self }
    }

    pub fn radius(&self, ring: usize) -> f64 {
        self.r_max * ring as f64 / (self.n_radial - 1) as f64
    }

    pub fn angle(&self, spoke: usize) -> f64 {
        2.0 * PI * spoke as f64 / self.n_angular as f64
    }

    pub fn radial_step(&self) -> f64 {
        self.r_max / (self.n_radial - 1) as f64
    }

    pub fn angular_step(&self) -> f64 {
        2.0 * PI / self.n_angular as f64
    }

    /// Largest distance between neighbouring samples.
    pub fn spacing(&self) -> f64 {
        self.radial_step().max(self.r_max * self.angular_step())
    }

    pub fn len(&self) -> usize {
        1 + (self.n_radial - 1) * self.n_angular
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The `idx`-th point: index 0 is the origin, then ring by ring.
    pub fn point(&self, idx: usize) -> GridPoint {
        if idx == 0 {
            return GridPoint {
                ring: 0,
                spoke: 0,
                r: 0.0,
                theta: 0.0,
                z: Complex64::new(0.0, 0.0),
            };
        }
        let ring = 1 + (idx - 1) / self.n_angular;
        let spoke = (idx - 1) % self.n_angular;
        let r = self.radius(ring);
        let theta = self.angle(spoke);
        GridPoint {
            ring,
            spoke,
            r,
            theta,
            z: Complex64::from_polar(r, theta),
        }
    }

    pub fn index(&self, ring: usize, spoke: usize) -> usize {
        if ring == 0 {
            0
        } else {
            1 + (ring - 1) * self.n_angular + spoke % self.n_angular
        }
    }

    pub fn points(&self) -> impl Iterator<Item = GridPoint> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    pub fn par_points(&self) -> impl ParallelIterator<Item = GridPoint> + '_ {
        (0..self.len()).into_par_iter().map(move |i| self.point(i))
    }
}

/// Maximum of `value` over the grid with its witness; ties go to the lowest
/// index so the result does not depend on how the sweep is partitioned.
/// NaN values are treated as the maximum.
pub fn grid_argmax<F>(grid: &GridSpec, value: F) -> (f64, GridPoint)
where
    F: Fn(&GridPoint) -> f64 + Sync,
{
    let (v, idx) = (0..grid.len())
        .into_par_iter()
        .map(|i| (value(&grid.point(i)), i))
        .reduce(|| (f64::NEG_INFINITY, usize::MAX), pick_max);
    (v, grid.point(idx.min(grid.len() - 1)))
}

/// Minimum counterpart of [`grid_argmax`].
pub fn grid_argmin<F>(grid: &GridSpec, value: F) -> (f64, GridPoint)
where
    F: Fn(&GridPoint) -> f64 + Sync,
{
    let (v, p) = grid_argmax(grid, |p| -value(p));
    (-v, p)
}

fn pick_max(a: (f64, usize), b: (f64, usize)) -> (f64, usize) {
    let key = |x: f64| if x.is_nan() { f64::INFINITY } else { x };
    match key(a.0).total_cmp(&key(b.0)) {
        std::cmp::Ordering::Greater => a,
        std::cmp::Ordering::Less => b,
        std::cmp::Ordering::Equal => {
            if a.1 <= b.1 {
                a
            } else {
                b
            }
        }
    }
}

/// Golden-section search for a maximum of `f` on `[a, b]`; returns `(x, f(x))`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, iterations: usize) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iterations {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    [(c, fc), (d, fd), (x, fx)]
        .into_iter()
        .fold((x, fx), |best, cand| if cand.1 > best.1 { cand } else { best })
}
