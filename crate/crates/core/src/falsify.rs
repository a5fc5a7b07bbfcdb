//! Randomized search for counterexamples to the derivative and coefficient
//! bounds.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::sup_modulus;
use crate::bounds::{b2_bound_check_sheared, coefficient_bound_check, verify_derivative_sums, BoundSource, VerifyOptions, MARGIN_TOL};
use crate::error::{HmapError, Result};
use crate::grid::GridSpec;
use crate::map::HarmonicMap;
use crate::series::Series;
use crate::transforms::{shear_on, ShearedMap};

pub const MAX_DEGREE: usize = 8;
pub const MAX_ORDER: usize = 5;
/// Series order of the sheared variants.
pub const SHEAR_ORDER: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FalsifyConfig {
    pub count: usize,
    pub seed: u64,
    pub grid: GridSpec,
    /// Every `shear_every`-th map is a sheared variant; `0` disables them.
    pub shear_every: usize,
}

impl FalsifyConfig {
    pub fn new(count: usize, seed: u64, grid: GridSpec) -> Self {
        Self {
            count,
            seed,
            grid,
            shear_every: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleKind {
    Polynomial,
    Sheared,
}

impl SampleKind {
    fn as_str(&self) -> &'static str {
        match self {
            SampleKind::Polynomial => "polynomial",
            SampleKind::Sheared => "sheared",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FalsifyRow {
    pub index: usize,
    pub kind: SampleKind,
    pub degree: usize,
    /// Dilatation bound `c` of sheared variants.
    pub c: Option<f64>,
    /// Worst margin of the n-th order derivative-sum bound, `n = 1..=5`.
    pub derivative_sum: [f64; MAX_ORDER],
    pub colonna: f64,
    pub lemma_a: f64,
    pub b2: Option<f64>,
    pub error: Option<String>,
}

impl FalsifyRow {
    pub fn min_margin(&self) -> f64 {
        self.derivative_sum
            .iter()
            .copied()
            .chain([self.colonna, self.lemma_a])
            .chain(self.b2)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_violation(&self) -> bool {
        self.error.is_none() && self.min_margin() < -MARGIN_TOL
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FalsifySummary {
    pub count: usize,
    pub seed: u64,
    pub grid: GridSpec,
    pub violations: usize,
    pub errors: usize,
    pub min_derivative_sum: [f64; MAX_ORDER],
    pub min_colonna: f64,
    pub min_lemma_a: f64,
    pub min_b2: Option<f64>,
    pub worst_index: Option<usize>,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FalsifyRun {
    pub rows: Vec<FalsifyRow>,
    pub summary: FalsifySummary,
}

fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) / 2f64.sqrt()
}

struct Sample {
    kind: SampleKind,
    degree: usize,
    c: Option<f64>,
    map: Result<HarmonicMap>,
    /// Unscaled sheared map for the `b_2` check.
    sheared: Option<ShearedMap>,
}

fn random_polynomial(rng: &mut ChaCha8Rng) -> (usize, Result<HarmonicMap>) {
    let degree = rng.random_range(1..=MAX_DEGREE);
    let a: Vec<Complex64> = (0..=degree).map(|_| gaussian(rng)).collect();
    let b: Vec<Complex64> = (1..=degree).map(|_| gaussian(rng)).collect();
    (degree, HarmonicMap::polynomial(a, b))
}

/// `F = z + sum_{k=2}^{d} t_k z^k` with small Gaussian `t_k` and
/// `omega = c z (z - a)/(1 - conj(a) z)`, `|a| <= 1/2`.
fn random_shear(rng: &mut ChaCha8Rng, grid: &GridSpec) -> (usize, f64, Result<ShearedMap>) {
    let degree = rng.random_range(1..=MAX_DEGREE);
    let mut f = vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
    for k in 2..=degree {
        f.push(gaussian(rng) * (0.3 / (k * k) as f64));
    }
    let c = rng.random_range(0.05..0.9);
    let a = Complex64::from_polar(rng.random_range(0.0..0.5), rng.random_range(0.0..std::f64::consts::TAU));
    // c z (z - a) sum_k (conj(a) z)^k
    let mut omega = vec![Complex64::new(0.0, 0.0); SHEAR_ORDER + 1];
    let mut geo = Complex64::new(1.0, 0.0);
    for k in 0..SHEAR_ORDER {
        if k + 2 <= SHEAR_ORDER {
            omega[k + 2] += c * geo;
        }
        omega[k + 1] -= c * a * geo;
        geo *= a.conj();
    }
    (degree, c, shear_on(&Series::new(f), &Series::new(omega), SHEAR_ORDER, grid))
}

fn sample(seed: u64, index: usize, config: &FalsifyConfig) -> Sample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let sheared = config.shear_every > 0 && index % config.shear_every == config.shear_every - 1;
    if sheared {
        let (degree, c, sheared) = random_shear(&mut rng, &config.grid);
        Sample {
            kind: SampleKind::Sheared,
            degree,
            c: Some(c),
            map: sheared.as_ref().map(|s| s.map.clone()).map_err(Clone::clone),
            sheared: sheared.ok(),
        }
    } else {
        let (degree, map) = random_polynomial(&mut rng);
        Sample {
            kind: SampleKind::Polynomial,
            degree,
            c: None,
            map,
            sheared: None,
        }
    }
}

/// `f / sup|f|` together with its own grid sup (1 up to rounding).
fn rescale(f: &HarmonicMap, grid: &GridSpec) -> Result<(HarmonicMap, f64)> {
    let sup = sup_modulus(f, grid)?;
    if !(sup > 0.0) {
        return Err(HmapError::DegenerateMap);
    }
    let (h, g) = f.coefficients().ok_or(HmapError::NotAnalytic)?;
    let s = Complex64::new(1.0 / sup, 0.0);
    let scaled = HarmonicMap::from_series(h.scale(s), g.scale(s))?;
    let m = sup_modulus(&scaled, grid)?;
    Ok((scaled, m))
}

fn check(index: usize, s: Sample, config: &FalsifyConfig) -> FalsifyRow {
    let mut row = FalsifyRow {
        index,
        kind: s.kind,
        degree: s.degree,
        c: s.c,
        derivative_sum: [f64::NAN; MAX_ORDER],
        colonna: f64::NAN,
        lemma_a: f64::NAN,
        b2: None,
        error: None,
    };
    let result = (|| -> Result<()> {
        let (f, m) = rescale(&s.map?, &config.grid)?;
        // m is the grid estimate of sup|f|
        let opts = VerifyOptions {
            bound: BoundSource::Fixed(m),
            ..Default::default()
        };
        let (orders, colonna) = verify_derivative_sums(&f, MAX_ORDER, &config.grid, &opts)?;
        for (slot, rep) in row.derivative_sum.iter_mut().zip(&orders) {
            *slot = rep.worst_margin;
        }
        row.colonna = colonna.worst_margin;
        let coeffs = coefficient_bound_check(&f, m)?;
        row.lemma_a = coeffs.worst_margin.min(coeffs.a0_margin.unwrap_or(f64::INFINITY));
        if let (Some(sh), Some(c)) = (&s.sheared, s.c) {
            row.b2 = Some(b2_bound_check_sheared(sh, c, &config.grid)?);
        }
        Ok(())
    })();
    if let Err(e) = result {
        row.error = Some(e.to_string());
    }
    row
}

/// Generates `config.count` maps from the seeded stream and runs the
/// verifiers on each. Violations are findings, not errors.
pub fn falsify(config: &FalsifyConfig) -> Result<FalsifyRun> {
    if config.count == 0 {
        return Err(HmapError::Parameter("count must be >= 1".into()));
    }
    config.grid.validate()?;
    let rows: Vec<FalsifyRow> = (0..config.count)
        .into_par_iter()
        .map(|i| check(i, sample(config.seed, i, config), config))
        .collect();
    let ok = || rows.iter().filter(|r| r.error.is_none());
    let min_of = |f: &dyn Fn(&FalsifyRow) -> f64| ok().map(f).fold(f64::INFINITY, f64::min);
    let mut min_derivative_sum = [f64::INFINITY; MAX_ORDER];
    for (n, slot) in min_derivative_sum.iter_mut().enumerate() {
        *slot = min_of(&|r| r.derivative_sum[n]);
    }
    let summary = FalsifySummary {
        count: rows.len(),
        seed: config.seed,
        grid: config.grid,
        violations: rows.iter().filter(|r| r.is_violation()).count(),
        errors: rows.iter().filter(|r| r.error.is_some()).count(),
        min_derivative_sum,
        min_colonna: min_of(&|r| r.colonna),
        min_lemma_a: min_of(&|r| r.lemma_a),
        min_b2: ok().filter_map(|r| r.b2).min_by(f64::total_cmp),
        worst_index: ok()
            .min_by(|a, b| a.min_margin().total_cmp(&b.min_margin()).then(a.index.cmp(&b.index)))
            .map(|r| r.index),
        tolerance: MARGIN_TOL,
    };
    Ok(FalsifyRun { rows, summary })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| format!("{x:e}"))
}

/// One line per map; the byte content depends only on the run.
pub fn to_csv(run: &FalsifyRun) -> String {
    let mut out = String::from("index,kind,degree,c,sum_n1,sum_n2,sum_n3,sum_n4,sum_n5,colonna,lemma_a,b2,min_margin,violation,error\n");
    for r in &run.rows {
        let _ = write!(out, "{},{},{},{}", r.index, r.kind.as_str(), r.degree, fmt_opt(r.c));
        for m in r.derivative_sum {
            let _ = write!(out, ",{m:e}");
        }
        let _ = writeln!(
            out,
            ",{:e},{:e},{},{:e},{},{}",
            r.colonna,
            r.lemma_a,
            fmt_opt(r.b2),
            r.min_margin(),
            r.is_violation(),
            r.error.as_deref().unwrap_or("").replace(',', ";")
        );
    }
    out
}
