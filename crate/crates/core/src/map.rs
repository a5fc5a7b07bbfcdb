//! Harmonic mappings `f = h + conj(g)` of the unit disk.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytic::Analytic;
use crate::error::{HmapError, Result};
use crate::series::Series;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Tolerance used when checking the normalization `h(0) = g(0) = 0, h'(0) = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Named closed-form maps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClosedForm {
    Identity,
    /// `f(z) = e^{a z}`.
    ExpLine { a: Complex64 },
    /// `f(z) = (2 M alpha / pi) arg((1 + psi(z)) / (1 - psi(z)))` with
    /// `psi(z) = e^{i rotation} (z + center) / (1 + conj(center) z)`.
    Colonna {
        m: f64,
        alpha: Complex64,
        rotation: f64,
        center: Complex64,
    },
    /// Analytic `scale * log((1 + z) / (1 - z))`.
    LogRatio { scale: Complex64 },
    /// Analytic `(a z + b) / (c z + d)`.
    Mobius {
        a: Complex64,
        b: Complex64,
        c: Complex64,
        d: Complex64,
    },
}

impl ClosedForm {
    pub fn colonna(m: f64) -> Self {
        ClosedForm::Colonna {
            m,
            alpha: ONE,
            rotation: 0.0,
            center: ZERO,
        }
    }

    pub fn exp_line(a: f64) -> Self {
        ClosedForm::ExpLine {
            a: Complex64::new(a, 0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicMap {
    h: Analytic,
    g: Analytic,
    known_sup: Option<f64>,
    known_re_sup: Option<f64>,
}

pub(crate) fn check_disk(z: Complex64) -> Result<()> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(HmapError::NonFinite("point"));
    }
    if z.norm() >= 1.0 {
        return Err(HmapError::Domain(z));
    }
    Ok(())
}

impl HarmonicMap {
    /// `h = sum a_k z^k` (k from 0), `g = sum b_k z^k` with `b[0]` holding `b_1`.
    pub fn polynomial(a: Vec<Complex64>, b: Vec<Complex64>) -> Result<Self> {
        let h = Series::new(if a.is_empty() { vec![ZERO] } else { a });
        let mut gc = Vec::with_capacity(b.len() + 1);
        gc.push(ZERO);
        gc.extend(b);
        let g = Series::new(gc);
        if !h.is_finite() || !g.is_finite() {
            return Err(HmapError::NonFinite("coefficients"));
        }
        Ok(Self {
            h: Analytic::Series(h),
            g: Analytic::Series(g),
            known_sup: None,
            known_re_sup: None,
        })
    }

    /// Builds `h + conj(g)` from series for both parts; `g(0)` is moved into `h`.
    pub fn from_series(h: Series, g: Series) -> Result<Self> {
        Self::from_parts(Analytic::Series(h), Analytic::Series(g))
    }

    /// Builds `h + conj(g)` and enforces the canonical decomposition `g(0) = 0`.
    pub fn from_parts(h: Analytic, g: Analytic) -> Result<Self> {
        let g0 = g.eval(ZERO);
        let h0 = h.eval(ZERO);
        if !(g0.re.is_finite() && g0.im.is_finite() && h0.re.is_finite() && h0.im.is_finite()) {
            return Err(HmapError::NonFinite("map parts"));
        }
        let (h, g) = if g0 != ZERO {
            (
                h.plus(&Analytic::constant(g0.conj())),
                g.plus(&Analytic::constant(-g0)),
            )
        } else {
            (h, g)
        };
        Ok(Self {
            h,
            g,
            known_sup: None,
            known_re_sup: None,
        })
    }

    /// The analytic map `F` viewed as `F + conj(0)`.
    pub fn analytic(f: Analytic) -> Self {
        Self {
            h: f,
            g: Analytic::zero(),
            known_sup: None,
            known_re_sup: None,
        }
    }

    pub fn identity() -> Self {
        Self::closed_form(&ClosedForm::Identity).expect("identity is valid")
    }

    pub fn closed_form(form: &ClosedForm) -> Result<Self> {
        let map = match *form {
            ClosedForm::Identity => Self {
                h: Analytic::identity(),
                g: Analytic::zero(),
                known_sup: Some(1.0),
                known_re_sup: Some(1.0),
            },
            ClosedForm::ExpLine { a } => {
                let bound = a.norm().exp();
                Self {
                    h: Analytic::Exp { scale: ONE, rate: a },
                    g: Analytic::zero(),
                    known_sup: Some(bound),
                    known_re_sup: Some(bound),
                }
            }
            ClosedForm::Colonna {
                m,
                alpha,
                rotation,
                center,
            } => {
                if !(m > 0.0 && m.is_finite()) {
                    return Err(HmapError::Parameter(format!("colonna M must be positive, got {m}")));
                }
                if (alpha.norm() - 1.0).abs() > 1e-12 {
                    return Err(HmapError::Parameter("colonna alpha must be unimodular".into()));
                }
                check_disk(center)?;
                let e = Complex64::from_polar(1.0, rotation);
                // (1 + psi) / (1 - psi) = (A z + B) / (C z + D)
                let log = Analytic::LogMobius {
                    scale: ONE,
                    a: center.conj() + e,
                    b: ONE + e * center,
                    c: center.conj() - e,
                    d: ONE - e * center,
                };
                let i = Complex64::new(0.0, 1.0);
                let ch = alpha * m / (i * PI);
                let cg = alpha.conj() * m / (i * PI);
                let mut map = Self::from_parts(log.scaled(ch), log.scaled(cg))?;
                map.known_sup = Some(m);
                map.known_re_sup = Some(m);
                map
            }
            ClosedForm::LogRatio { scale } => Self {
                h: Analytic::LogMobius {
                    scale,
                    a: ONE,
                    b: ONE,
                    c: -ONE,
                    d: ONE,
                },
                g: Analytic::zero(),
                known_sup: None,
                // Re(scale * L) = Re(scale) ln|.| - Im(scale) arg(.), |arg| < pi/2
                known_re_sup: (scale.re == 0.0).then(|| scale.im.abs() * PI / 2.0),
            },
            ClosedForm::Mobius { a, b, c, d } => {
                if c.norm() > d.norm() || d.norm() == 0.0 {
                    return Err(HmapError::Parameter("mobius pole must lie outside the open disk".into()));
                }
                Self::analytic(Analytic::Mobius { a, b, c, d })
            }
        };
        Ok(map)
    }

    pub fn h(&self) -> &Analytic {
        &self.h
    }

    pub fn g(&self) -> &Analytic {
        &self.g
    }

    pub fn is_analytic(&self) -> bool {
        self.g.is_identically_zero()
    }

    /// Coefficient series `(h, g)` when both parts are polynomials.
    pub fn coefficients(&self) -> Option<(&Series, &Series)> {
        Some((self.h.as_series()?, self.g.as_series()?))
    }

    /// Known supremum of `|f|` over the disk, for closed forms that carry one.
    pub fn known_sup_bound(&self) -> Option<f64> {
        self.known_sup
    }

    /// Known supremum of `|Re f|` over the disk.
    pub fn known_re_sup_bound(&self) -> Option<f64> {
        self.known_re_sup
    }

    /// Taylor truncation of both parts (polynomials are just truncated).
    pub fn to_polynomial(&self, order: usize) -> Result<Self> {
        let mut out = Self::from_series(self.h.taylor(order)?, self.g.taylor(order)?)?;
        out.known_sup = self.known_sup;
        out.known_re_sup = self.known_re_sup;
        Ok(out)
    }

    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        check_disk(z)?;
        Ok(self.evaluate_unchecked(z))
    }

    pub(crate) fn evaluate_unchecked(&self, z: Complex64) -> Complex64 {
        self.h.eval(z) + self.g.eval(z).conj()
    }

    /// `d^n f / dz^n = h^(n)(z)` or, when `conjugated`, `d^n f / dzbar^n = conj(g^(n)(z))`.
    pub fn wirtinger_derivative(&self, n: usize, conjugated: bool, z: Complex64) -> Result<Complex64> {
        if n == 0 {
            return Err(HmapError::Parameter("derivative order must be >= 1".into()));
        }
        check_disk(z)?;
        if conjugated {
            Ok(self.g.derivative(n, z)?.conj())
        } else {
            self.h.derivative(n, z)
        }
    }

    /// `(h'(z), g'(z))` without domain checks.
    pub(crate) fn first_derivatives(&self, z: Complex64) -> (Complex64, Complex64) {
        let hp = self.h.derivative(1, z).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
        let gp = self.g.derivative(1, z).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
        (hp, gp)
    }

    /// `Lambda_f(z) = |h'| + |g'|`.
    pub fn lambda_big(&self, z: Complex64) -> f64 {
        let (hp, gp) = self.first_derivatives(z);
        hp.norm() + gp.norm()
    }

    /// `lambda_f(z) = ||h'| - |g'||`.
    pub fn lambda_small(&self, z: Complex64) -> f64 {
        let (hp, gp) = self.first_derivatives(z);
        (hp.norm() - gp.norm()).abs()
    }

    /// Whether every derivative of both parts vanishes identically.
    pub fn is_constant(&self) -> bool {
        let h_const = match &self.h {
            Analytic::Series(s) => s.degree().is_none_or(|d| d == 0),
            other => other.is_identically_zero(),
        };
        h_const && self.g.is_identically_zero()
    }
}

/// A member of `S_H`: `h(0) = g(0) = 0` and `h'(0) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedMap {
    inner: HarmonicMap,
    s_h0: bool,
}

impl NormalizedMap {
    pub fn new(inner: HarmonicMap) -> Result<Self> {
        let h0 = inner.h.eval(ZERO);
        let g0 = inner.g.eval(ZERO);
        let (hp0, gp0) = inner.first_derivatives(ZERO);
        if h0.norm() > NORMALIZATION_TOL {
            return Err(HmapError::NotNormalized(format!("h(0) = {h0}")));
        }
        if g0.norm() > NORMALIZATION_TOL {
            return Err(HmapError::NotNormalized(format!("g(0) = {g0}")));
        }
        if (hp0 - ONE).norm() > NORMALIZATION_TOL {
            return Err(HmapError::NotNormalized(format!("h'(0) = {hp0}")));
        }
        Ok(Self {
            s_h0: gp0.norm() <= NORMALIZATION_TOL,
            inner,
        })
    }

    pub fn identity() -> Self {
        Self::new(HarmonicMap::identity()).expect("identity is normalized")
    }

    /// Whether additionally `g'(0) = 0`.
    pub fn is_s_h0(&self) -> bool {
        self.s_h0
    }

    pub fn map(&self) -> &HarmonicMap {
        &self.inner
    }

    pub fn into_map(self) -> HarmonicMap {
        self.inner
    }
}

impl AsRef<HarmonicMap> for NormalizedMap {
    fn as_ref(&self) -> &HarmonicMap {
        &self.inner
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn quad(b2: f64) -> HarmonicMap {
        HarmonicMap::polynomial(vec![ZERO, ONE], vec![ZERO, c(b2, 0.0)]).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let f = quad(0.3);
        assert_abs_diff_eq!((f.evaluate(c(0.5, 0.0)).unwrap() - c(0.575, 0.0)).norm(), 0.0, epsilon = 1e-15);
        let id = HarmonicMap::identity();
        assert_eq!(id.evaluate(c(0.2, 0.1)).unwrap(), c(0.2, 0.1));
        let col = HarmonicMap::closed_form(&ClosedForm::colonna(1.0)).unwrap();
        assert_abs_diff_eq!(col.evaluate(ZERO).unwrap().norm(), 0.0, epsilon = 1e-15);
        assert!(matches!(f.evaluate(c(1.0, 0.0)), Err(HmapError::Domain(_))));
        assert!(matches!(f.evaluate(c(f64::NAN, 0.0)), Err(HmapError::NonFinite(_))));
    }

    #[test]
    fn colonna_matches_argument_formula() {
        let forms = [
            ClosedForm::colonna(1.0),
            ClosedForm::Colonna {
                m: 2.5,
                alpha: Complex64::from_polar(1.0, 0.7),
                rotation: 1.1,
                center: c(0.2, -0.3),
            },
        ];
        for form in &forms {
            let ClosedForm::Colonna { m, alpha, rotation, center } = *form else { unreachable!() };
            let f = HarmonicMap::closed_form(form).unwrap();
            assert_abs_diff_eq!(f.g().eval(ZERO).norm(), 0.0, epsilon = 1e-15);
            for &z in &[c(0.1, 0.2), c(-0.7, 0.5), c(0.95, -0.01)] {
                let psi = Complex64::from_polar(1.0, rotation) * (z + center) / (ONE + center.conj() * z);
                let expect = alpha * (2.0 * m / PI) * ((ONE + psi) / (ONE - psi)).arg();
                assert_abs_diff_eq!((f.evaluate(z).unwrap() - expect).norm(), 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn wirtinger_examples() {
        let f = quad(0.3);
        let d = f.wirtinger_derivative(1, true, c(0.5, 0.0)).unwrap();
        assert_abs_diff_eq!((d - c(0.3, 0.0)).norm(), 0.0, epsilon = 1e-15);
        let id = HarmonicMap::identity();
        assert_eq!(id.wirtinger_derivative(2, false, c(0.3, 0.3)).unwrap(), ZERO);
        assert!(id.wirtinger_derivative(0, false, ZERO).is_err());
    }

    #[test]
    fn colonna_first_derivative_at_origin() {
        // h = (M/(i pi)) log((1+z)/(1-z)), h'(0) = 2M/(i pi)
        let col = HarmonicMap::closed_form(&ClosedForm::colonna(1.0)).unwrap();
        let hp = col.wirtinger_derivative(1, false, ZERO).unwrap();
        assert_abs_diff_eq!(hp.norm(), 2.0 / PI, epsilon = 1e-15);
        let step = 1e-6;
        let fd = (col.h().eval(c(step, 0.0)) - col.h().eval(c(-step, 0.0))) / (2.0 * step);
        assert_abs_diff_eq!((fd - hp).norm(), 0.0, epsilon = 1e-8);
    }

    #[test]
    fn canonical_decomposition_moves_constant() {
        let f = HarmonicMap::from_series(Series::from_real(&[0.0, 1.0]), Series::from_real(&[0.5, 0.2])).unwrap();
        assert_eq!(f.g().eval(ZERO), ZERO);
        assert_abs_diff_eq!((f.evaluate(c(0.3, 0.0)).unwrap() - c(0.3 + 0.5 + 0.06, 0.0)).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn normalization() {
        assert!(NormalizedMap::identity().is_s_h0());
        let f = HarmonicMap::polynomial(vec![ZERO, ONE], vec![c(0.4, 0.0)]).unwrap();
        let n = NormalizedMap::new(f).unwrap();
        assert!(!n.is_s_h0());
        let bad = HarmonicMap::polynomial(vec![ZERO, c(2.0, 0.0)], vec![]).unwrap();
        assert!(matches!(NormalizedMap::new(bad), Err(HmapError::NotNormalized(_))));
    }

    #[test]
    fn constant_detection() {
        let k = HarmonicMap::polynomial(vec![c(0.7, 0.0)], vec![]).unwrap();
        assert!(k.is_constant());
        assert!(!HarmonicMap::identity().is_constant());
    }

    #[test]
    fn mobius_pole_on_the_boundary_is_allowed() {
        let koebe_like = ClosedForm::Mobius { a: ONE, b: ZERO, c: -ONE, d: ONE };
        let f = HarmonicMap::closed_form(&koebe_like).unwrap();
        assert_abs_diff_eq!((f.evaluate(c(0.5, 0.0)).unwrap() - ONE).norm(), 0.0, epsilon = 1e-15);
        let inside = ClosedForm::Mobius { a: ONE, b: ZERO, c: -ONE, d: c(0.5, 0.0) };
        assert!(HarmonicMap::closed_form(&inside).is_err());
        let degenerate = ClosedForm::Mobius { a: ONE, b: ZERO, c: ZERO, d: ZERO };
        assert!(HarmonicMap::closed_form(&degenerate).is_err());
    }
}
