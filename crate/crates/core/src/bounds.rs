//! Right-hand sides of the Schwarz-Pick type inequalities and grid verifiers
//! for them, plus coefficient and distortion checks.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{sup_modulus, sup_re_modulus};
use crate::analytic::Analytic;
use crate::error::{HmapError, Result};
use crate::grid::{GridPoint, GridSpec};
use crate::map::{HarmonicMap, NormalizedMap};
use crate::transforms::ShearedMap;

/// Margins are compared against `-MARGIN_TOL`.
pub const MARGIN_TOL: f64 = 1e-9;

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn check_r(r: f64) -> Result<()> {
    if !(0.0..1.0).contains(&r) {
        return Err(HmapError::Parameter(format!("radius {r} not in [0, 1)")));
    }
    Ok(())
}

fn check_m(m: f64) -> Result<()> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(HmapError::Parameter(format!("bound M = {m} must be positive")));
    }
    Ok(())
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(HmapError::Parameter("derivative order must be >= 1".into()));
    }
    Ok(())
}

fn check_unit(v: f64, what: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(HmapError::Parameter(format!("{what} = {v} not in [0, 1]")));
    }
    Ok(())
}

/// `n! (4M/pi) / ((1-r)^n (1+r))`.
pub fn rhs_schwarz_pick_harmonic(n: usize, m: f64, r: f64) -> Result<f64> {
    check_n(n)?;
    check_m(m)?;
    check_r(r)?;
    Ok(factorial(n) * 4.0 * m / PI / ((1.0 - r).powi(n as i32) * (1.0 + r)))
}

/// `(4M/pi) / (1 - r^2)`.
pub fn rhs_colonna(m: f64, r: f64) -> Result<f64> {
    check_m(m)?;
    check_r(r)?;
    Ok(4.0 * m / PI / (1.0 - r * r))
}

/// `n! M / (1-r)^(n+1)`.
pub fn rhs_thm_a(n: usize, m: f64, r: f64) -> Result<f64> {
    check_n(n)?;
    check_m(m)?;
    check_r(r)?;
    Ok(factorial(n) * m / (1.0 - r).powi(n as i32 + 1))
}

/// `n! (1 - |f(z)|^2) / ((1-r)^n (1+r))` for analytic self-maps of the disk.
pub fn rhs_ruscheweyh(n: usize, modulus_fz: f64, r: f64) -> Result<f64> {
    check_n(n)?;
    check_unit(modulus_fz, "|f(z)|")?;
    check_r(r)?;
    Ok(factorial(n) * (1.0 - modulus_fz * modulus_fz) / ((1.0 - r).powi(n as i32) * (1.0 + r)))
}

/// `(2m+1)! / (1-r^2)^(2m+1) * sum_k C(m,k)^2 r^(2k)`.
pub fn rhs_szasz(m: usize, r: f64) -> Result<f64> {
    check_r(r)?;
    let sum: f64 = (0..=m).map(|k| binomial(m, k).powi(2) * r.powi(2 * k as i32)).sum();
    Ok(factorial(2 * m + 1) / (1.0 - r * r).powi(2 * m as i32 + 1) * sum)
}

/// `(1 - |f(z)|^2) / (1 - r^2)`.
pub fn rhs_schwarz(modulus_fz: f64, r: f64) -> Result<f64> {
    check_unit(modulus_fz, "|f(z)|")?;
    check_r(r)?;
    Ok((1.0 - modulus_fz * modulus_fz) / (1.0 - r * r))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Inequality {
    /// `|d^n f/dz^n| + |d^n f/dzbar^n| <= n! 4M/pi / ((1-r)^n (1+r))`.
    #[serde(rename = "thm1.1")]
    SchwarzPickHarmonic,
    /// `Lambda_f <= (4M/pi) / (1-r^2)`.
    #[serde(rename = "thmB")]
    Colonna,
    /// each of `|d^n f/dz^n|`, `|d^n f/dzbar^n|` `<= n! M / (1-r)^(n+1)`.
    #[serde(rename = "thmC")]
    ThmA,
    /// `|F^(n)| <= n! 4 sup|Re F| / pi / ((1-r)^n (1+r))`.
    #[serde(rename = "cor1.2")]
    AnalyticRealPart,
    #[serde(rename = "schwarz")]
    Schwarz,
    #[serde(rename = "szasz")]
    Szasz,
    #[serde(rename = "ruscheweyh")]
    Ruscheweyh,
}

impl Inequality {
    pub fn tag(&self) -> &'static str {
        match self {
            Inequality::SchwarzPickHarmonic => "thm1.1",
            Inequality::Colonna => "thmB",
            Inequality::ThmA => "thmC",
            Inequality::AnalyticRealPart => "cor1.2",
            Inequality::Schwarz => "schwarz",
            Inequality::Szasz => "szasz",
            Inequality::Ruscheweyh => "ruscheweyh",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        let all = [
            Inequality::SchwarzPickHarmonic,
            Inequality::Colonna,
            Inequality::ThmA,
            Inequality::AnalyticRealPart,
            Inequality::Schwarz,
            Inequality::Szasz,
            Inequality::Ruscheweyh,
        ];
        all.into_iter().find(|i| i.tag() == tag)
    }
}

/// Where the bound `M` comes from.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundSource {
    /// The closed-form bound when the map carries one, else the grid estimate.
    #[default]
    Auto,
    GridEstimate,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub bound: BoundSource,
    pub tolerance: f64,
    pub keep_pointwise: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            bound: BoundSource::Auto,
            tolerance: MARGIN_TOL,
            keep_pointwise: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointwiseRow {
    pub r: f64,
    pub theta: f64,
    pub lhs: f64,
    pub rhs: f64,
}

/// Outcome of one inequality over one grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub inequality: Inequality,
    pub n: Option<usize>,
    #[serde(rename = "M")]
    pub m_used: f64,
    pub m_source: String,
    pub worst_margin: f64,
    pub worst_point: [f64; 2],
    pub worst_lhs: f64,
    pub worst_rhs: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub grid: GridSpec,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pointwise: Option<Vec<PointwiseRow>>,
}

fn resolve_bound(source: BoundSource, known: Option<f64>, estimate: impl FnOnce() -> Result<f64>) -> Result<(f64, &'static str)> {
    match source {
        BoundSource::Fixed(m) => {
            check_m(m)?;
            Ok((m, "fixed"))
        }
        BoundSource::Auto if known.is_some() => Ok((known.unwrap(), "closed_form")),
        _ => Ok((estimate()?, "grid_estimate")),
    }
}

struct Sweep {
    worst: (f64, GridPoint, f64, f64),
    pointwise: Option<Vec<PointwiseRow>>,
}

fn sweep<F>(grid: &GridSpec, keep: bool, eval: F) -> Result<Sweep>
where
    F: Fn(&GridPoint) -> Result<(f64, f64)> + Sync,
{
    let mut out = sweep_multi(grid, 1, keep, |p, slot| {
        slot[0] = eval(p)?;
        Ok(())
    })?;
    Ok(out.pop().expect("one check"))
}

/// Runs `checks` inequalities per grid point in a single pass; `eval` fills
/// one `(lhs, rhs)` pair per check.
fn sweep_multi<F>(grid: &GridSpec, checks: usize, keep: bool, eval: F) -> Result<Vec<Sweep>>
where
    F: Fn(&GridPoint, &mut [(f64, f64)]) -> Result<()> + Sync,
{
    let mut buf = vec![(0.0, 0.0); grid.len() * checks];
    buf.par_chunks_mut(checks)
        .enumerate()
        .try_for_each(|(i, chunk)| eval(&grid.point(i), chunk))?;
    (0..checks)
        .map(|c| {
            let mut worst: Option<(f64, usize, f64, f64)> = None;
            for i in 0..grid.len() {
                let (l, r) = buf[i * checks + c];
                let m = r - l;
                if !m.is_finite() {
                    return Err(HmapError::NonFinite("inequality margin"));
                }
                if worst.is_none_or(|w| m < w.0) {
                    worst = Some((m, i, l, r));
                }
            }
            let (m, i, l, r) = worst.expect("grid is non-empty");
            let pointwise = keep.then(|| {
                (0..grid.len())
                    .map(|i| {
                        let p = grid.point(i);
                        let (lhs, rhs) = buf[i * checks + c];
                        PointwiseRow {
                            r: p.r,
                            theta: p.theta,
                            lhs,
                            rhs,
                        }
                    })
                    .collect()
            });
            Ok(Sweep {
                worst: (m, grid.point(i), l, r),
                pointwise,
            })
        })
        .collect()
}

fn report(
    inequality: Inequality,
    n: Option<usize>,
    (m_used, source): (f64, &str),
    grid: &GridSpec,
    opts: &VerifyOptions,
    s: Sweep,
) -> BoundReport {
    let (margin, p, lhs, rhs) = s.worst;
    BoundReport {
        inequality,
        n,
        m_used,
        m_source: source.to_string(),
        worst_margin: margin,
        worst_point: [p.z.re, p.z.im],
        worst_lhs: lhs,
        worst_rhs: rhs,
        tolerance: opts.tolerance,
        pass: margin >= -opts.tolerance,
        grid: *grid,
        pointwise: s.pointwise,
    }
}

/// Sum of the n-th Wirtinger derivative moduli against
/// [`rhs_schwarz_pick_harmonic`] with `M` from `opts.bound`.
pub fn verify_derivative_sum_bound(f: &HarmonicMap, n: usize, grid: &GridSpec, opts: &VerifyOptions) -> Result<BoundReport> {
    check_n(n)?;
    grid.validate()?;
    let bound = resolve_bound(opts.bound, f.known_sup_bound(), || sup_modulus(f, grid))?;
    let s = sweep(grid, opts.keep_pointwise, |p| {
        let lhs = f.h().derivative(n, p.z)?.norm() + f.g().derivative(n, p.z)?.norm();
        Ok((lhs, rhs_schwarz_pick_harmonic(n, bound.0, p.r)?))
    })?;
    Ok(report(Inequality::SchwarzPickHarmonic, Some(n), bound, grid, opts, s))
}

/// [`verify_derivative_sum_bound`] for every order `1..=max_order` together
/// with [`verify_colonna`], sharing one grid pass and one bound `M`.
pub fn verify_derivative_sums(f: &HarmonicMap, max_order: usize, grid: &GridSpec, opts: &VerifyOptions) -> Result<(Vec<BoundReport>, BoundReport)> {
    check_n(max_order)?;
    grid.validate()?;
    let bound = resolve_bound(opts.bound, f.known_sup_bound(), || sup_modulus(f, grid))?;
    let mut sweeps = sweep_multi(grid, max_order + 1, opts.keep_pointwise, |p, out| {
        let mut dh = [Complex64::new(0.0, 0.0); 16];
        let mut dg = dh;
        let k = max_order + 1;
        if k > dh.len() {
            return Err(HmapError::UnsupportedOrder { order: max_order, max: dh.len() - 1 });
        }
        f.h().derivatives_into(p.z, &mut dh[..k])?;
        f.g().derivatives_into(p.z, &mut dg[..k])?;
        for n in 1..=max_order {
            out[n - 1] = (dh[n].norm_sqr().sqrt() + dg[n].norm_sqr().sqrt(), rhs_schwarz_pick_harmonic(n, bound.0, p.r)?);
        }
        out[max_order] = (out[0].0, rhs_colonna(bound.0, p.r)?);
        Ok(())
    })?;
    let colonna = report(Inequality::Colonna, Some(1), bound, grid, opts, sweeps.pop().expect("colonna"));
    let orders = sweeps
        .into_iter()
        .enumerate()
        .map(|(i, s)| report(Inequality::SchwarzPickHarmonic, Some(i + 1), bound, grid, opts, s))
        .collect();
    Ok((orders, colonna))
}

/// `Lambda_f(z)` against [`rhs_colonna`].
pub fn verify_colonna(f: &HarmonicMap, grid: &GridSpec, opts: &VerifyOptions) -> Result<BoundReport> {
    grid.validate()?;
    let bound = resolve_bound(opts.bound, f.known_sup_bound(), || sup_modulus(f, grid))?;
    let s = sweep(grid, opts.keep_pointwise, |p| Ok((f.lambda_big(p.z), rhs_colonna(bound.0, p.r)?)))?;
    Ok(report(Inequality::Colonna, Some(1), bound, grid, opts, s))
}

/// The larger of the two n-th Wirtinger derivative moduli against [`rhs_thm_a`].
pub fn verify_thm_a(f: &HarmonicMap, n: usize, grid: &GridSpec, opts: &VerifyOptions) -> Result<BoundReport> {
    check_n(n)?;
    grid.validate()?;
    let bound = resolve_bound(opts.bound, f.known_sup_bound(), || sup_modulus(f, grid))?;
    let s = sweep(grid, opts.keep_pointwise, |p| {
        let lhs = f.h().derivative(n, p.z)?.norm().max(f.g().derivative(n, p.z)?.norm());
        Ok((lhs, rhs_thm_a(n, bound.0, p.r)?))
    })?;
    Ok(report(Inequality::ThmA, Some(n), bound, grid, opts, s))
}

/// `|F^(n)|` of an analytic map against the real-part bound.
pub fn verify_analytic_re_bound(f: &HarmonicMap, n: usize, grid: &GridSpec, opts: &VerifyOptions) -> Result<BoundReport> {
    check_n(n)?;
    grid.validate()?;
    if !f.is_analytic() {
        return Err(HmapError::NotAnalytic);
    }
    let bound = resolve_bound(opts.bound, f.known_re_sup_bound(), || sup_re_modulus(f, grid))?;
    if bound.0 == 0.0 || f.is_constant() {
        return Err(HmapError::DegenerateMap);
    }
    let s = sweep(grid, opts.keep_pointwise, |p| {
        Ok((f.h().derivative(n, p.z)?.norm(), rhs_schwarz_pick_harmonic(n, bound.0, p.r)?))
    })?;
    Ok(report(Inequality::AnalyticRealPart, Some(n), bound, grid, opts, s))
}

/// Classical bounds for analytic self-maps of the disk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelfMapBound {
    Schwarz,
    /// order `2m + 1`
    Szasz { m: usize },
    Ruscheweyh { n: usize },
}

/// Verifies a classical bound for an analytic `F` with `|F| < 1` on the grid.
pub fn verify_analytic_self_map(f: &Analytic, which: SelfMapBound, grid: &GridSpec, opts: &VerifyOptions) -> Result<BoundReport> {
    grid.validate()?;
    let map = HarmonicMap::analytic(f.clone());
    let sup = sup_modulus(&map, grid)?;
    if sup >= 1.0 {
        return Err(HmapError::HypothesisViolated(format!("sup |F| = {sup} is not < 1")));
    }
    let (ineq, order) = match which {
        SelfMapBound::Schwarz => (Inequality::Schwarz, 1),
        SelfMapBound::Szasz { m } => (Inequality::Szasz, 2 * m + 1),
        SelfMapBound::Ruscheweyh { n } => {
            check_n(n)?;
            (Inequality::Ruscheweyh, n)
        }
    };
    let s = sweep(grid, opts.keep_pointwise, |p| {
        let d = f.derivatives(p.z, order)?;
        let fz = d[0].norm().min(1.0);
        let rhs = match which {
            SelfMapBound::Schwarz => rhs_schwarz(fz, p.r)?,
            SelfMapBound::Szasz { m } => rhs_szasz(m, p.r)?,
            SelfMapBound::Ruscheweyh { n } => rhs_ruscheweyh(n, fz, p.r)?,
        };
        Ok((d[order].norm(), rhs))
    })?;
    Ok(report(ineq, Some(order), (1.0, "self_map"), grid, opts, s))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientEntry {
    pub n: usize,
    pub value: f64,
    pub bound: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientReport {
    pub check: String,
    pub entries: Vec<CoefficientEntry>,
    pub worst_index: usize,
    pub worst_margin: f64,
    /// `M - |a_0|` for the sup-bound check.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub a0_margin: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

fn coefficient_report(check: &str, entries: Vec<CoefficientEntry>, a0_margin: Option<f64>) -> CoefficientReport {
    let worst = entries
        .iter()
        .copied()
        .fold(None::<CoefficientEntry>, |w, e| match w {
            Some(w) if w.margin <= e.margin => Some(w),
            _ => Some(e),
        });
    let (worst_index, worst_margin) = worst.map_or((0, f64::INFINITY), |w| (w.n, w.margin));
    let pass = worst_margin >= -MARGIN_TOL && a0_margin.is_none_or(|m| m >= -MARGIN_TOL);
    CoefficientReport {
        check: check.to_string(),
        entries,
        worst_index,
        worst_margin,
        a0_margin,
        tolerance: MARGIN_TOL,
        pass,
    }
}

/// `|a_0| <= M` and `|a_n| + |b_n| <= 4M/pi` for every stored `n >= 1`.
pub fn coefficient_bound_check(f: &HarmonicMap, m: f64) -> Result<CoefficientReport> {
    check_m(m)?;
    let (h, g) = f
        .coefficients()
        .ok_or_else(|| HmapError::Parameter("coefficient checks need a polynomial map".into()))?;
    let len = h.coeffs.len().max(g.coeffs.len());
    let bound = 4.0 * m / PI;
    let entries = (1..len)
        .map(|n| {
            let value = h.coeff(n).norm() + g.coeff(n).norm();
            CoefficientEntry {
                n,
                value,
                bound,
                margin: bound - value,
            }
        })
        .collect();
    Ok(coefficient_report("lemmaA", entries, Some(m - h.coeff(0).norm())))
}

/// `|a_n| + |b_n| <= n` for `n >= 2`.
pub fn coefficient_growth_check(f: &NormalizedMap) -> Result<CoefficientReport> {
    let (h, g) = f
        .map()
        .coefficients()
        .ok_or_else(|| HmapError::Parameter("coefficient checks need a polynomial map".into()))?;
    let len = h.coeffs.len().max(g.coeffs.len());
    let entries = (2..len)
        .map(|n| {
            let value = h.coeff(n).norm() + g.coeff(n).norm();
            CoefficientEntry {
                n,
                value,
                bound: n as f64,
                margin: n as f64 - value,
            }
        })
        .collect();
    Ok(coefficient_report("growth", entries, None))
}

/// Lower distortion bound along one ray.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistortionCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    /// Intermediate bound with the extra `((1+rho)/(1+r))^(c1+1)` factor.
    pub sharper_rhs: f64,
    pub sharper_margin: f64,
}

/// `Lambda_f(r xi) >= 2^{-(1+c1)} Lambda_f(rho xi) ((1-r)/(1-rho))^(c1-1)`.
pub fn verify_distortion_lower(f: &NormalizedMap, c1: f64, xi: Complex64, rho: f64, r: f64) -> Result<DistortionCheck> {
    if (xi.norm() - 1.0).abs() > 1e-12 {
        return Err(HmapError::Parameter("xi must be unimodular".into()));
    }
    if !(0.0 <= rho && rho <= r && r < 1.0) {
        return Err(HmapError::Parameter(format!("need 0 <= rho <= r < 1, got rho = {rho}, r = {r}")));
    }
    if !(c1 > 0.0 && c1.is_finite()) {
        return Err(HmapError::Parameter(format!("c1 = {c1} must be positive")));
    }
    let map = f.map();
    let lhs = map.lambda_big(xi * r);
    let inner = map.lambda_big(xi * rho);
    let t = (1.0 - r) / (1.0 - rho);
    let rhs = inner * t.powf(c1 - 1.0) / 2f64.powf(1.0 + c1);
    let sharper_rhs = inner * t.powf(c1 - 1.0) * ((1.0 + rho) / (1.0 + r)).powf(c1 + 1.0);
    Ok(DistortionCheck {
        lhs,
        rhs,
        margin: lhs - rhs,
        sharper_rhs,
        sharper_margin: lhs - sharper_rhs,
    })
}

/// Worst distortion margins over all rays and radius pairs of the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistortionSweep {
    pub c1: f64,
    pub worst_margin: f64,
    pub worst_sharper_margin: f64,
    pub worst: (f64, f64, f64),
    pub pass: bool,
}

pub fn distortion_sweep(f: &NormalizedMap, c1: f64, grid: &GridSpec) -> Result<DistortionSweep> {
    grid.validate()?;
    let per_ray: Vec<(f64, f64, (f64, f64, f64))> = (0..grid.n_angular)
        .into_par_iter()
        .map(|k| {
            let theta = grid.angle(k);
            let xi = Complex64::from_polar(1.0, theta);
            let mut worst = (f64::INFINITY, f64::INFINITY, (theta, 0.0, 0.0));
            for i in 0..grid.n_radial {
                for j in i..grid.n_radial {
                    let d = verify_distortion_lower(f, c1, xi, grid.radius(i), grid.radius(j))?;
                    if d.margin < worst.0 {
                        worst.0 = d.margin;
                        worst.2 = (theta, grid.radius(i), grid.radius(j));
                    }
                    worst.1 = worst.1.min(d.sharper_margin);
                }
            }
            Ok(worst)
        })
        .collect::<Result<_>>()?;
    let w = per_ray
        .iter()
        .copied()
        .fold(per_ray[0], |a, b| if b.0 < a.0 { b } else { a });
    let sharper = per_ray.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    Ok(DistortionSweep {
        c1,
        worst_margin: w.0,
        worst_sharper_margin: sharper,
        worst: w.2,
        pass: w.0 >= -MARGIN_TOL,
    })
}

/// Margin `c/2 - |b_2|` for `f` in `S_H^0` with `|omega| <= c` on the grid.
pub fn b2_bound_check(f: &NormalizedMap, c: f64, grid: &GridSpec) -> Result<f64> {
    let map = f.map();
    b2_margin(f, c, grid, |z| {
        let (hp, gp) = map.first_derivatives(z);
        gp.norm() / hp.norm()
    })
}

/// [`b2_bound_check`] for a sheared map, with the hypothesis read off the
/// recorded dilatation rather than the truncated `g'/h'`.
pub fn b2_bound_check_sheared(s: &ShearedMap, c: f64, grid: &GridSpec) -> Result<f64> {
    let f = s.normalized()?;
    b2_margin(&f, c, grid, |z| s.dilatation.eval(z).norm())
}

fn b2_margin(f: &NormalizedMap, c: f64, grid: &GridSpec, omega: impl Fn(Complex64) -> f64 + Sync) -> Result<f64> {
    if !(0.0..1.0).contains(&c) {
        return Err(HmapError::Parameter(format!("c = {c} not in [0, 1)")));
    }
    if !f.is_s_h0() {
        return Err(HmapError::HypothesisViolated("g'(0) != 0, map is not in S_H^0".into()));
    }
    grid.validate()?;
    let (sup_omega, at) = crate::grid::grid_argmax(grid, |p| omega(p.z));
    if !(sup_omega <= c + MARGIN_TOL) {
        return Err(HmapError::HypothesisViolated(format!(
            "|omega({})| = {sup_omega} exceeds c = {c}",
            at.z
        )));
    }
    let b2 = f.map().g().derivative(2, Complex64::new(0.0, 0.0))? / 2.0;
    Ok(c / 2.0 - b2.norm())
}

/// Empirical boundary lower-Lipschitz fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzFit {
    pub c2_hat: f64,
    pub c3_hat: f64,
    pub worst_pair: (Complex64, Complex64),
    /// `(c3, largest admissible c2)` for each exponent tried.
    pub table: Vec<(f64, f64)>,
    pub radius: f64,
}

/// Exponents tried by [`boundary_lipschitz_fit`]: `1.00, 1.05, ..., 1.95`.
pub fn lipschitz_exponents() -> Vec<f64> {
    (0..20).map(|k| 1.0 + 0.05 * k as f64).collect()
}

/// For each exponent `c3` in [`lipschitz_exponents`], the largest `c2` with
/// `|f(z1) - f(z2)| >= c2 |z1 - z2|^c3` over all pairs of `n_samples` points
/// on the circle of the given radius; reports the exponent whose `c2` is
/// largest.
pub fn boundary_lipschitz_fit(f: &HarmonicMap, n_samples: usize, radius: f64) -> Result<LipschitzFit> {
    if n_samples < 2 {
        return Err(HmapError::Parameter("need at least two boundary samples".into()));
    }
    check_r(radius)?;
    let zs: Vec<Complex64> = (0..n_samples)
        .map(|k| Complex64::from_polar(radius, 2.0 * PI * k as f64 / n_samples as f64))
        .collect();
    let ws: Vec<Complex64> = zs.iter().map(|&z| f.evaluate_unchecked(z)).collect();
    let exps = lipschitz_exponents();
    let per_source: Vec<Vec<(f64, usize, usize)>> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut best = vec![(f64::INFINITY, i, i); exps.len()];
            for j in (i + 1)..n_samples {
                let dz = (zs[i] - zs[j]).norm();
                if dz == 0.0 {
                    continue;
                }
                let dw = (ws[i] - ws[j]).norm();
                for (slot, &c3) in best.iter_mut().zip(&exps) {
                    let ratio = dw / dz.powf(c3);
                    if ratio < slot.0 {
                        *slot = (ratio, i, j);
                    }
                }
            }
            best
        })
        .collect();
    let mut table = Vec::with_capacity(exps.len());
    let mut pairs = Vec::with_capacity(exps.len());
    for (e, &c3) in exps.iter().enumerate() {
        let w = per_source
            .iter()
            .map(|v| v[e])
            .fold((f64::INFINITY, 0, 0), |a, b| if b.0 < a.0 { b } else { a });
        table.push((c3, w.0));
        pairs.push((w.1, w.2));
    }
    let (best, _) = table
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &(_, c2))| if c2 > acc.1 { (i, c2) } else { acc });
    Ok(LipschitzFit {
        c2_hat: table[best].1,
        c3_hat: table[best].0,
        worst_pair: (zs[pairs[best].0], zs[pairs[best].1]),
        table,
        radius,
    })
}
