//! Analytic functions on the unit disk with derivatives of every order.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HmapError, Result};
use crate::series::Series;

/// Highest derivative order served by closed forms.
pub const MAX_CLOSED_FORM_ORDER: usize = 48;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Analytic {
    /// Truncated power series (a polynomial).
    Series(Series),
    /// `scale * exp(rate * z)`.
    Exp { scale: Complex64, rate: Complex64 },
    /// `scale * Log((a z + b) / (c z + d))`, principal branch.
    ///
    /// Callers guarantee the ratio stays off the negative real axis on the disk.
    LogMobius {
        scale: Complex64,
        a: Complex64,
        b: Complex64,
        c: Complex64,
        d: Complex64,
    },
    /// `(a z + b) / (c z + d)` with the pole outside the open disk.
    Mobius {
        a: Complex64,
        b: Complex64,
        c: Complex64,
        d: Complex64,
    },
    Sum { terms: Vec<Analytic> },
    Scaled { factor: Complex64, inner: Box<Analytic> },
}

impl Analytic {
    pub fn zero() -> Self {
        Analytic::Series(Series::zero())
    }

    pub fn identity() -> Self {
        Analytic::Series(Series::identity())
    }

    pub fn constant(c: Complex64) -> Self {
        Analytic::Series(Series::constant(c))
    }

    pub fn as_series(&self) -> Option<&Series> {
        match self {
            Analytic::Series(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_identically_zero(&self) -> bool {
        match self {
            Analytic::Series(s) => s.is_zero(),
            Analytic::Exp { scale, .. } | Analytic::LogMobius { scale, .. } => *scale == ZERO,
            Analytic::Mobius { a, b, .. } => *a == ZERO && *b == ZERO,
            Analytic::Sum { terms: parts } => parts.iter().all(Analytic::is_identically_zero),
            Analytic::Scaled { factor: s, inner } => *s == ZERO || inner.is_identically_zero(),
        }
    }

    /// Largest derivative order this representation can evaluate.
    pub fn max_order(&self) -> usize {
        match self {
            Analytic::Series(_) => usize::MAX,
            Analytic::Sum { terms: parts } => parts.iter().map(Analytic::max_order).min().unwrap_or(usize::MAX),
            Analytic::Scaled { inner, .. } => inner.max_order(),
            _ => MAX_CLOSED_FORM_ORDER,
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            Analytic::Series(s) => s.eval(z),
            _ => self.derivatives(z, 0).map(|d| d[0]).unwrap_or(Complex64::new(f64::NAN, f64::NAN)),
        }
    }

    /// Writes `F^(j)(z)` into `out[j]` for `j < out.len()`.
    pub fn derivatives_into(&self, z: Complex64, out: &mut [Complex64]) -> Result<()> {
        match self {
            Analytic::Series(s) => {
                s.eval_derivatives_into(z, out);
                Ok(())
            }
            _ => {
                let d = self.derivatives(z, out.len().saturating_sub(1))?;
                out.copy_from_slice(&d[..out.len()]);
                Ok(())
            }
        }
    }

    pub fn derivative(&self, n: usize, z: Complex64) -> Result<Complex64> {
        Ok(self.derivatives(z, n)?[n])
    }

    /// Values of `F, F', ..., F^(k)` at `z`.
    pub fn derivatives(&self, z: Complex64, k: usize) -> Result<Vec<Complex64>> {
        let max = self.max_order();
        if k > max {
            return Err(HmapError::UnsupportedOrder { order: k, max });
        }
        let out = match self {
            Analytic::Series(s) => s.eval_derivatives(z, k),
            Analytic::Exp { scale, rate } => {
                let base = *scale * (*rate * z).exp();
                let mut out = Vec::with_capacity(k + 1);
                let mut p = ONE;
                for _ in 0..=k {
                    out.push(base * p);
                    p *= *rate;
                }
                out
            }
            Analytic::LogMobius { scale, a, b, c, d } => {
                let num = *a * z + *b;
                let den = *c * z + *d;
                let mut out = Vec::with_capacity(k + 1);
                out.push(*scale * (num / den).ln());
                // d^n/dz^n Log(a z + b) = (-1)^(n-1) (n-1)! a^n / (a z + b)^n
                let (ra, rc) = (*a / num, *c / den);
                let (mut pa, mut pc) = (ONE, ONE);
                let mut fact = 1.0;
                for n in 1..=k {
                    pa *= ra;
                    pc *= rc;
                    if n > 1 {
                        fact *= (n - 1) as f64;
                    }
                    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
                    out.push(*scale * (pa - pc) * (sign * fact));
                }
                out
            }
            Analytic::Mobius { a, b, c, d } => {
                let den = *c * z + *d;
                let mut out = Vec::with_capacity(k + 1);
                out.push((*a * z + *b) / den);
                // n-th derivative: (-1)^(n-1) n! c^(n-1) (ad - bc) / den^(n+1)
                let det = *a * *d - *b * *c;
                let mut term = det / (den * den);
                for n in 1..=k {
                    out.push(term);
                    term *= -*c * (n + 1) as f64 / den;
                }
                out
            }
            Analytic::Sum { terms: parts } => {
                let mut out = vec![ZERO; k + 1];
                for p in parts {
                    for (o, v) in out.iter_mut().zip(p.derivatives(z, k)?) {
                        *o += v;
                    }
                }
                out
            }
            Analytic::Scaled { factor: s, inner } => inner.derivatives(z, k)?.into_iter().map(|v| v * s).collect(),
        };
        Ok(out)
    }

    /// Taylor polynomial about the origin of the given order.
    pub fn taylor(&self, order: usize) -> Result<Series> {
        if let Analytic::Series(s) = self {
            return Ok(s.truncated(order));
        }
        let d = self.derivatives(ZERO, order)?;
        let mut fact = 1.0;
        let coeffs = d
            .into_iter()
            .enumerate()
            .map(|(k, v)| {
                if k > 1 {
                    fact *= k as f64;
                }
                v / fact
            })
            .collect();
        Ok(Series::new(coeffs))
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        match self {
            Analytic::Series(p) => Analytic::Series(p.scale(s)),
            Analytic::Scaled { factor: t, inner } => Analytic::Scaled { factor: s * t, inner: inner.clone() },
            other => Analytic::Scaled { factor: s, inner: Box::new(other.clone()) },
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        match (self, other) {
            (Analytic::Series(p), Analytic::Series(q)) => Analytic::Series(p.add(q)),
            (a, b) if b.is_identically_zero() => a.clone(),
            (a, b) if a.is_identically_zero() => b.clone(),
            (Analytic::Sum { terms: ps }, b) => {
                let mut parts = ps.clone();
                parts.push(b.clone());
                Analytic::Sum { terms: parts }
            }
            (a, b) => Analytic::Sum { terms: vec![a.clone(), b.clone()] },
        }
    }

    /// Linear combination `self + s * other`.
    pub fn plus_scaled(&self, s: Complex64, other: &Self) -> Self {
        self.plus(&other.scaled(s))
    }

    /// The function `conj(F(conj z))`, analytic again.
    pub fn conj_reflect(&self) -> Self {
        match self {
            Analytic::Series(s) => Analytic::Series(s.conj()),
            Analytic::Exp { scale, rate } => Analytic::Exp {
                scale: scale.conj(),
                rate: rate.conj(),
            },
            Analytic::LogMobius { scale, a, b, c, d } => Analytic::LogMobius {
                scale: scale.conj(),
                a: a.conj(),
                b: b.conj(),
                c: c.conj(),
                d: d.conj(),
            },
            Analytic::Mobius { a, b, c, d } => Analytic::Mobius {
                a: a.conj(),
                b: b.conj(),
                c: c.conj(),
                d: d.conj(),
            },
            Analytic::Sum { terms: parts } => Analytic::Sum { terms: parts.iter().map(Analytic::conj_reflect).collect() },
            Analytic::Scaled { factor: s, inner } => Analytic::Scaled { factor: s.conj(), inner: Box::new(inner.conj_reflect()) },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    // central difference of an analytic function along the real direction
    fn fd(f: &Analytic, n: usize, z: Complex64) -> Complex64 {
        let h = 1e-5;
        let e = c(h, 0.0);
        (f.derivative(n, z + e).unwrap() - f.derivative(n, z - e).unwrap()) / (2.0 * h)
    }

    #[test]
    fn closed_form_derivatives_match_finite_differences() {
        let forms = [
            Analytic::Exp { scale: c(0.5, 0.1), rate: c(1.2, -0.7) },
            Analytic::LogMobius { scale: c(0.0, -0.3), a: ONE, b: ONE, c: -ONE, d: ONE },
            Analytic::Mobius { a: ONE, b: ZERO, c: -ONE, d: ONE },
            Analytic::Sum { terms: vec![Analytic::identity(), Analytic::Exp { scale: ONE, rate: c(0.0, 1.0) }] },
        ];
        let z = c(0.21, -0.33);
        for f in &forms {
            for n in 0..4 {
                let exact = f.derivative(n + 1, z).unwrap();
                let approx = fd(f, n, z);
                assert!((exact - approx).norm() <= 1e-6 * (1.0 + exact.norm()), "{f:?} n={n}");
            }
        }
    }

    #[test]
    fn taylor_of_mobius() {
        // z / (1 - z) = sum_{k>=1} z^k
        let m = Analytic::Mobius { a: ONE, b: ZERO, c: -ONE, d: ONE };
        let t = m.taylor(8).unwrap();
        assert_abs_diff_eq!(t.coeff(0).norm(), 0.0, epsilon = 1e-15);
        for k in 1..=8 {
            assert_abs_diff_eq!(t.coeff(k).re, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn unsupported_order() {
        let e = Analytic::Exp { scale: ONE, rate: ONE };
        assert!(matches!(
            e.derivative(MAX_CLOSED_FORM_ORDER + 1, ZERO),
            Err(HmapError::UnsupportedOrder { .. })
        ));
        assert!(Analytic::identity().derivative(100, ZERO).is_ok());
    }

    #[test]
    fn conj_reflect_is_pointwise_reflection() {
        let f = Analytic::Exp { scale: c(0.5, 0.1), rate: c(1.2, -0.7) }
            .plus(&Analytic::Series(Series::new(vec![c(0.0, 1.0), c(0.3, 0.2)])));
        let z = c(0.4, 0.1);
        let lhs = f.conj_reflect().eval(z);
        let rhs = f.eval(z.conj()).conj();
        assert_abs_diff_eq!((lhs - rhs).norm(), 0.0, epsilon = 1e-14);
    }
}
