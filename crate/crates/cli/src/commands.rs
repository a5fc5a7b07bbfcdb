use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use hmap_core::bounds::{
    coefficient_bound_check, coefficient_growth_check, verify_analytic_re_bound, verify_analytic_self_map, verify_colonna,
    verify_derivative_sum_bound, verify_thm_a, BoundSource, Inequality, SelfMapBound, VerifyOptions,
};
use hmap_core::connectivity::{growth_exponent_experiment, criterion_constants, linear_connectivity_estimate, verify_shear_criterion, Part, ShearCriterionOptions};
use hmap_core::describe::{BuiltMap, MapDescription};
use hmap_core::falsify::{self as fz, FalsifyConfig};
use hmap_core::transforms::DEFAULT_ORDER;
use hmap_core::univalence::{becker_certify, injectivity_oracle, john_certify, john_experiment, pre_schwarzian_norm, JohnExperiment, JohnFamily};
use hmap_core::{point_profile, sup_inf_lambda, sup_modulus, Complex64, GridSpec, NormalizedMap};
use serde_json::json;

use crate::report::{csv_table, num, opt, Outcome, RunConfig};

type Res<T> = Result<T, String>;

fn s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn load(path: &Path, config: &mut RunConfig) -> Res<BuiltMap> {
    config.maps.push(path.display().to_string());
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    MapDescription::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))?.build().map_err(s)
}

fn parse_complex(text: &str) -> Res<Complex64> {
    let parts: Vec<&str> = text.split(',').collect();
    let p = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("`{text}`: {e}"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(p(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(p(re)?, p(im)?)),
        _ => Err(format!("expected RE or RE,IM, got `{text}`")),
    }
}

#[derive(Args, Debug)]
pub struct MapArg {
    #[arg(long)]
    pub map: PathBuf,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(long)]
    pub map: PathBuf,
    /// Point as RE,IM; repeatable.
    #[arg(long = "z", allow_hyphen_values = true)]
    pub points: Vec<String>,
}

pub fn eval(a: &EvalArgs, config: &mut RunConfig) -> Res<Outcome> {
    let f = load(&a.map, config)?.map;
    config.params = json!({ "points": a.points });
    if a.points.is_empty() {
        let sup = sup_modulus(&f, &config.grid).map_err(s)?;
        let (big, small) = sup_inf_lambda(&f, &config.grid).map_err(s)?;
        return Ok(Outcome::json(json!({ "sup_modulus": sup, "M_f_hat": big, "m_f_hat": small }), true));
    }
    let rows = a
        .points
        .iter()
        .map(|t| {
            let z = parse_complex(t)?;
            let value = f.evaluate(z).map_err(s)?;
            let profile = point_profile(&f, z).map_err(s)?;
            Ok(json!({ "z": z, "value": value, "profile": profile }))
        })
        .collect::<Res<Vec<_>>>()?;
    Ok(Outcome::json(rows, true))
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub map: PathBuf,
    /// thm1.1, thmB, thmC, cor1.2, schwarz, szasz or ruscheweyh.
    #[arg(long, default_value = "thm1.1")]
    pub inequality: String,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Fixed bound M; otherwise the closed-form bound or the grid estimate.
    #[arg(long)]
    pub m: Option<f64>,
    /// Dump (r, theta, lhs, rhs) for every grid point.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

pub fn verify(a: &VerifyArgs, config: &mut RunConfig) -> Res<Outcome> {
    let which = Inequality::from_tag(&a.inequality).ok_or_else(|| format!("unknown inequality `{}`", a.inequality))?;
    let f = load(&a.map, config)?.map;
    config.params = json!({ "inequality": which.tag(), "n": a.n, "m": a.m, "csv": a.csv });
    let opts = VerifyOptions {
        bound: a.m.map_or(BoundSource::Auto, BoundSource::Fixed),
        tolerance: config.tolerance,
        keep_pointwise: a.csv.is_some(),
    };
    let grid = &config.grid;
    let analytic_part = || {
        if f.is_analytic() {
            Ok(f.h().clone())
        } else {
            Err(format!("`{}` needs an analytic map", which.tag()))
        }
    };
    let mut rep = match which {
        Inequality::SchwarzPickHarmonic => verify_derivative_sum_bound(&f, a.n, grid, &opts),
        Inequality::Colonna => verify_colonna(&f, grid, &opts),
        Inequality::ThmA => verify_thm_a(&f, a.n, grid, &opts),
        Inequality::AnalyticRealPart => verify_analytic_re_bound(&f, a.n, grid, &opts),
        Inequality::Schwarz => verify_analytic_self_map(&analytic_part()?, SelfMapBound::Schwarz, grid, &opts),
        Inequality::Szasz => verify_analytic_self_map(&analytic_part()?, SelfMapBound::Szasz { m: a.n }, grid, &opts),
        Inequality::Ruscheweyh => verify_analytic_self_map(&analytic_part()?, SelfMapBound::Ruscheweyh { n: a.n }, grid, &opts),
    }
    .map_err(s)?;
    if let (Some(path), Some(rows)) = (&a.csv, rep.pointwise.take()) {
        let text = csv_table("r,theta,lhs,rhs", rows.iter().map(|p| vec![num(p.r), num(p.theta), num(p.lhs), num(p.rhs)]));
        fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    let pass = rep.pass;
    Ok(Outcome::json(rep, pass))
}

#[derive(Args, Debug)]
pub struct CoeffsArgs {
    #[arg(long)]
    pub map: PathBuf,
    /// Bound M; defaults to the closed-form bound or the grid estimate.
    #[arg(long)]
    pub m: Option<f64>,
    /// Truncation order for closed forms.
    #[arg(long, default_value_t = DEFAULT_ORDER)]
    pub order: usize,
}

pub fn coeffs(a: &CoeffsArgs, config: &mut RunConfig) -> Res<Outcome> {
    let f = load(&a.map, config)?.map;
    config.params = json!({ "m": a.m, "order": a.order });
    let m = match (a.m, f.known_sup_bound()) {
        (Some(m), _) | (None, Some(m)) => m,
        (None, None) => sup_modulus(&f, &config.grid).map_err(s)?,
    };
    let poly = if f.coefficients().is_some() { f } else { f.to_polynomial(a.order).map_err(s)? };
    let bound = coefficient_bound_check(&poly, m).map_err(s)?;
    // the growth bound has hypotheses beyond normalization; reported only
    let growth = NormalizedMap::new(poly).ok().map(|g| coefficient_growth_check(&g)).transpose().map_err(s)?;
    let pass = bound.pass;
    Ok(Outcome::json(json!({ "M": m, "lemmaA": bound, "growth": growth }), pass))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Becker,
    John,
    Both,
}

#[derive(Args, Debug)]
pub struct UnivalenceArgs {
    #[arg(long, required_unless_present = "family")]
    pub map: Option<PathBuf>,
    /// John experiment family description (JSON).
    #[arg(long, conflicts_with = "map")]
    pub family: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "both")]
    pub criterion: Criterion,
    /// Also search for a collision of images.
    #[arg(long)]
    pub oracle: bool,
    /// Collision tolerance for the oracle.
    #[arg(long)]
    pub collision_tol: Option<f64>,
}

pub fn univalence(a: &UnivalenceArgs, config: &mut RunConfig) -> Res<Outcome> {
    config.params = json!({ "criterion": a.criterion, "oracle": a.oracle, "collision_tol": a.collision_tol });
    if let Some(path) = &a.family {
        return john_from_family(read_family(path, config)?, config);
    }
    let f = load(a.map.as_deref().expect("clap enforces --map"), config)?.map;
    let grid = &config.grid;
    let mut out = serde_json::Map::new();
    let mut certified = false;
    if a.criterion != Criterion::John {
        if f.is_analytic() {
            let norm = pre_schwarzian_norm(f.h(), grid).map_err(s)?;
            let ok = becker_certify(f.h(), grid).map_err(s)?;
            certified |= ok;
            out.insert("becker".into(), json!({ "pre_schwarzian_norm": norm, "certified": ok }));
        } else if a.criterion == Criterion::Becker {
            return Err("the Becker criterion needs an analytic map".into());
        } else {
            out.insert("becker".into(), json!(null));
        }
    }
    if a.criterion != Criterion::Becker {
        let p = john_certify(&f, grid).map_err(s)?;
        certified |= p.certified;
        out.insert("john".into(), serde_json::to_value(p).map_err(s)?);
    }
    let mut pass = true;
    if a.oracle {
        let w = injectivity_oracle(&f, grid, a.collision_tol);
        pass = !(certified && w.is_some());
        out.insert("witness".into(), serde_json::to_value(w).map_err(s)?);
    }
    out.insert("certified".into(), json!(certified));
    Ok(Outcome::json(out, pass))
}

fn read_family(path: &Path, config: &mut RunConfig) -> Res<JohnFamily> {
    config.maps.push(path.display().to_string());
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn john_from_family(family: JohnFamily, config: &RunConfig) -> Res<Outcome> {
    let exp = john_experiment(&family, &config.grid).map_err(s)?;
    let pass = exp.summary.soundness_violations == 0;
    let csv = john_csv(&exp);
    Ok(Outcome::json(exp, pass).with_csv(csv))
}

fn john_csv(exp: &JohnExperiment) -> String {
    csv_table(
        "params,mu_f,criterion_value,certified,witness_distance,z1_re,z1_im,z2_re,z2_im,error",
        exp.rows.iter().map(|r| {
            let w = r.witness.as_ref();
            vec![
                r.params.iter().map(|p| num(*p)).collect::<Vec<_>>().join(";"),
                opt(r.mu_f),
                opt(r.criterion_value),
                r.certified.map(|c| c.to_string()).unwrap_or_default(),
                opt(w.map(|w| w.image_distance)),
                opt(w.map(|w| w.z1.re)),
                opt(w.map(|w| w.z1.im)),
                opt(w.map(|w| w.z2.re)),
                opt(w.map(|w| w.z2.im)),
                r.error.clone().unwrap_or_default().replace(',', ";"),
            ]
        }),
    )
}

#[derive(Args, Debug)]
pub struct JohnArgs {
    #[arg(long, group = "source")]
    pub family: Option<PathBuf>,
    /// exp(a z) for a in START:STOP:STEP.
    #[arg(long, group = "source")]
    pub exp_line: Option<String>,
    /// z + b conj(z^2) for b in START:STOP:STEP.
    #[arg(long, group = "source")]
    pub quadratic: Option<String>,
}

fn parse_range(text: &str) -> Res<(f64, f64, f64)> {
    let v: Vec<f64> = text
        .split(':')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("`{text}`: {e}")))
        .collect::<Res<_>>()?;
    match v.as_slice() {
        [a, b, c] => Ok((*a, *b, *c)),
        _ => Err(format!("expected START:STOP:STEP, got `{text}`")),
    }
}

pub fn john(a: &JohnArgs, config: &mut RunConfig) -> Res<Outcome> {
    config.params = json!({ "exp_line": a.exp_line, "quadratic": a.quadratic });
    let family = if let Some(path) = &a.family {
        read_family(path, config)?
    } else if let Some(r) = &a.exp_line {
        let (x, y, z) = parse_range(r)?;
        JohnFamily::exp_line_range(x, y, z).map_err(s)?
    } else if let Some(r) = &a.quadratic {
        let (x, y, z) = parse_range(r)?;
        JohnFamily::quadratic_conj_range(x, y, z).map_err(s)?
    } else {
        JohnFamily::exp_line_range(0.5, 4.0, 0.25).map_err(s)?
    };
    john_from_family(family, config)
}

#[derive(Args, Debug)]
pub struct ConnectivityArgs {
    #[arg(long)]
    pub map: PathBuf,
    /// Mesh as RADIALxANGULAR.
    #[arg(long, value_parser = crate::parse_resolution, default_value = "64x256")]
    pub resolution: (usize, usize),
    #[arg(long, default_value_t = 64)]
    pub pairs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn connectivity(a: &ConnectivityArgs, config: &mut RunConfig) -> Res<Outcome> {
    let f = load(&a.map, config)?.map;
    config.seed = Some(a.seed);
    let mesh = GridSpec::new(a.resolution.0, a.resolution.1, config.grid.r_max).map_err(s)?;
    config.params = json!({ "resolution": mesh, "pairs": a.pairs });
    let est = linear_connectivity_estimate(&f, &mesh, a.pairs, a.seed).map_err(s)?;
    Ok(Outcome::json(est, true))
}

#[derive(Args, Debug)]
pub struct CriteriaArgs {
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    /// Dilatation bound for part I.
    #[arg(long, conflicts_with = "m3")]
    pub m1: Option<f64>,
    /// Dilatation bound for part II.
    #[arg(long)]
    pub m3: Option<f64>,
    /// Sheared map to check; its dilatation bound is measured on the grid.
    #[arg(long)]
    pub map: Option<PathBuf>,
    /// Part to check with --map (i or ii).
    #[arg(long, default_value = "i")]
    pub part: String,
    #[arg(long, value_parser = crate::parse_resolution, default_value = "64x256")]
    pub resolution: (usize, usize),
    #[arg(long, default_value_t = 64)]
    pub pairs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1.10)]
    pub slack: f64,
}

pub fn criteria(a: &CriteriaArgs, config: &mut RunConfig) -> Res<Outcome> {
    config.params = json!({ "alpha": a.alpha, "m1": a.m1, "m3": a.m3, "part": a.part });
    let Some(path) = &a.map else {
        let (m, part) = match (a.m1, a.m3) {
            (Some(m), None) => (m, Part::I),
            (None, Some(m)) => (m, Part::II),
            _ => return Err("give --m1 or --m3 (or --map)".into()),
        };
        let constants = criterion_constants(a.alpha, m, part).map_err(s)?;
        return Ok(Outcome::json(constants, true));
    };
    let part = match a.part.to_ascii_lowercase().as_str() {
        "i" | "1" => Part::I,
        "ii" | "2" => Part::II,
        other => return Err(format!("unknown part `{other}`")),
    };
    let built = load(path, config)?;
    let sheared = built.sheared.ok_or("--map must describe a shear")?;
    config.seed = Some(a.seed);
    let opts = ShearCriterionOptions {
        mesh: GridSpec::new(a.resolution.0, a.resolution.1, config.grid.r_max).map_err(s)?,
        grid: config.grid,
        n_pairs: a.pairs,
        seed: a.seed,
        slack: a.slack,
        ..ShearCriterionOptions::default()
    };
    let rep = verify_shear_criterion(&sheared, a.alpha, part, &opts).map_err(s)?;
    let pass = rep.pass;
    Ok(Outcome::json(rep, pass))
}

pub fn growth_exponent(a: &MapArg, config: &mut RunConfig) -> Res<Outcome> {
    let f = NormalizedMap::new(load(&a.map, config)?.map).map_err(s)?;
    config.params = json!({});
    let rows = growth_exponent_experiment(&f, &config.grid).map_err(s)?;
    let csv = csv_table("theta,c4_min,rho,r", rows.iter().map(|r| vec![num(r.theta), num(r.c4_min), num(r.rho), num(r.r)]));
    Ok(Outcome::json(rows, true).with_csv(csv))
}

#[derive(Args, Debug)]
pub struct FalsifyArgs {
    #[arg(long, default_value_t = 1000)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn falsify(a: &FalsifyArgs, config: &mut RunConfig) -> Res<Outcome> {
    if a.count == 0 {
        return Err("--count must be at least 1".into());
    }
    config.seed = Some(a.seed);
    config.params = json!({ "count": a.count });
    let run = fz::falsify(&FalsifyConfig::new(a.count, a.seed, config.grid)).map_err(s)?;
    let pass = run.summary.violations == 0;
    let csv = fz::to_csv(&run);
    Ok(Outcome::json(run.summary, pass).with_csv(csv))
}
