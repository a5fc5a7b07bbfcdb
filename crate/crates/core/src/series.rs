//! Truncated power series with complex coefficients.
//!
//! `coeffs[k]` is the coefficient of `z^k`. All products and quotients are
//! truncated to an explicit order, so coefficients up to that order are exact
//! (up to rounding) for the corresponding operation on the full series.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HmapError, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Series {
    pub coeffs: Vec<Complex64>,
}

impl Series {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![ZERO] }
    }

    pub fn constant(c: Complex64) -> Self {
        Self { coeffs: vec![c] }
    }

    /// The series `z`.
    pub fn identity() -> Self {
        Self {
            coeffs: vec![ZERO, ONE],
        }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self {
            coeffs: coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect(),
        }
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    /// Index of the highest non-zero coefficient, `None` for the zero series.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| *c != ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.degree().is_none()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn truncated(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, ZERO);
        Self { coeffs }
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    /// Values of `p, p', ..., p^(k)` at `z`, computed in a single pass.
    pub fn eval_derivatives(&self, z: Complex64, k: usize) -> Vec<Complex64> {
        let mut out = vec![ZERO; k + 1];
        self.eval_derivatives_into(z, &mut out);
        out
    }

    /// [`Series::eval_derivatives`] writing `p^(j)` into `out[j]` for
    /// `j < out.len()`.
    pub fn eval_derivatives_into(&self, z: Complex64, out: &mut [Complex64]) {
        out.fill(ZERO);
        if out.is_empty() {
            return;
        }
        let k = out.len() - 1;
        let Some(deg) = self.degree() else {
            return;
        };
        out[0] = self.coeffs[deg];
        for i in (0..deg).rev() {
            let upto = k.min(deg - i);
            for j in (1..=upto).rev() {
                out[j] = out[j] * z + out[j - 1];
            }
            out[0] = out[0] * z + self.coeffs[i];
        }
        // out[j] currently holds p^(j)/j!
        let mut fact = 1.0;
        for (j, v) in out.iter_mut().enumerate().skip(1) {
            fact *= j as f64;
            *v *= fact;
        }
    }

    pub fn derivative_at(&self, n: usize, z: Complex64) -> Complex64 {
        self.eval_derivatives(z, n)[n]
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        }
    }

    /// Term-wise antiderivative with zero constant term.
    pub fn integral(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(ZERO);
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| c / (k + 1) as f64),
        );
        Self { coeffs }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self {
            coeffs: (0..n).map(|k| self.coeff(k) + other.coeff(k)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-ONE))
    }

    /// Coefficient-wise complex conjugate, i.e. the series of `conj(p(conj z))`.
    pub fn conj(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
        }
    }

    pub fn mul_trunc(&self, other: &Self, order: usize) -> Self {
        let mut out = vec![ZERO; order + 1];
        for (i, &a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a == ZERO {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate().take(order + 1 - i) {
                out[i + j] += a * b;
            }
        }
        Self { coeffs: out }
    }

    /// Quotient `self / divisor` to the given order by the recursive
    /// convolution `q_k = (p_k - sum_{j=1..k} d_j q_{k-j}) / d_0`.
    pub fn div_trunc(&self, divisor: &Self, order: usize) -> Result<Self> {
        let d0 = divisor.coeff(0);
        if d0.norm() == 0.0 {
            return Err(HmapError::Parameter(
                "series division by a series with zero constant term".into(),
            ));
        }
        let mut q = vec![ZERO; order + 1];
        for k in 0..=order {
            let mut acc = self.coeff(k);
            for j in 1..=k {
                acc -= divisor.coeff(j) * q[k - j];
            }
            q[k] = acc / d0;
        }
        Ok(Self { coeffs: q })
    }

    /// Series of `self(phi(z))` for the disk automorphism
    /// `phi(z) = (z + z0) / (1 + conj(z0) z)`, truncated to `order`.
    ///
    /// Uses `phi(z) = z0 + (1 - |z0|^2) sum_{k>=1} (-conj z0)^{k-1} z^k` and
    /// accumulates `sum a_k phi^k` by repeated truncated multiplication.
    pub fn compose_disk_automorphism(&self, z0: Complex64, order: usize) -> Self {
        let phi = automorphism_series(z0, order);
        let mut acc = Series::new(vec![ZERO; order + 1]);
        let mut power = Series::constant(ONE).truncated(order);
        for (k, &a) in self.coeffs.iter().enumerate() {
            if k > 0 {
                power = power.mul_trunc(&phi, order);
            }
            if a != ZERO {
                for (slot, &p) in acc.coeffs.iter_mut().zip(&power.coeffs) {
                    *slot += a * p;
                }
            }
        }
        acc
    }
}

/// Taylor series of `(z + z0) / (1 + conj(z0) z)` about the origin.
pub fn automorphism_series(z0: Complex64, order: usize) -> Series {
    let mut coeffs = vec![ZERO; order + 1];
    coeffs[0] = z0;
    let scale = 1.0 - z0.norm_sqr();
    let ratio = -z0.conj();
    let mut p = ONE;
    for slot in coeffs.iter_mut().skip(1) {
        *slot = p * scale;
        p *= ratio;
    }
    Series { coeffs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn horner_and_derivatives() {
        // p = 1 + 2z + 3z^2 + 4z^3
        let p = Series::from_real(&[1.0, 2.0, 3.0, 4.0]);
        let z = c(0.3, -0.2);
        let d = p.eval_derivatives(z, 4);
        assert_abs_diff_eq!((d[0] - p.eval(z)).norm(), 0.0, epsilon = 1e-15);
        let d1 = c(2.0, 0.0) + z * 6.0 + z * z * 12.0;
        let d2 = c(6.0, 0.0) + z * 24.0;
        assert_abs_diff_eq!((d[1] - d1).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!((d[2] - d2).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!((d[3] - c(24.0, 0.0)).norm(), 0.0, epsilon = 1e-14);
        assert_eq!(d[4], ZERO);
        assert_eq!(Series::zero().eval_derivatives(z, 2), vec![ZERO; 3]);
    }

    #[test]
    fn division_geometric() {
        // 1 / (1 - 0.5 z) = sum 0.5^k z^k
        let one = Series::constant(ONE);
        let d = Series::from_real(&[1.0, -0.5]);
        let q = one.div_trunc(&d, 10).unwrap();
        for k in 0..=10 {
            assert_abs_diff_eq!(q.coeff(k).re, 0.5f64.powi(k as i32), epsilon = 1e-15);
        }
        assert!(one.div_trunc(&Series::identity(), 3).is_err());
    }

    #[test]
    fn division_inverts_multiplication() {
        let p = Series::new(vec![c(1.0, 0.5), c(-0.3, 0.2), c(0.1, 0.0), c(0.0, 0.7)]);
        let d = Series::new(vec![c(2.0, -1.0), c(0.4, 0.4), c(0.0, -0.2)]);
        let q = p.div_trunc(&d, 12).unwrap();
        let back = q.mul_trunc(&d, 12);
        for k in 0..=12 {
            assert_abs_diff_eq!((back.coeff(k) - p.coeff(k)).norm(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn integral_then_derivative() {
        let p = Series::new(vec![c(1.0, 1.0), c(2.0, 0.0), c(0.0, 3.0)]);
        let back = p.integral().derivative();
        assert_eq!(back.coeffs.len(), 3);
        for k in 0..3 {
            assert_abs_diff_eq!((back.coeff(k) - p.coeff(k)).norm(), 0.0, epsilon = 1e-15);
        }
        assert_eq!(p.integral().coeff(0), ZERO);
    }

    #[test]
    fn automorphism_composition_matches_pointwise() {
        let z0 = c(0.3, -0.4);
        let p = Series::new(vec![c(0.1, 0.0), c(1.0, 0.0), c(0.2, -0.1), c(0.0, 0.05)]);
        let comp = p.compose_disk_automorphism(z0, 40);
        for &z in &[c(0.1, 0.2), c(-0.3, 0.0), c(0.0, -0.25)] {
            let phi = (z + z0) / (ONE + z0.conj() * z);
            assert_abs_diff_eq!((comp.eval(z) - p.eval(phi)).norm(), 0.0, epsilon = 1e-12);
        }
        let phi = automorphism_series(z0, 5);
        assert_eq!(phi.coeff(0), z0);
        assert_abs_diff_eq!(phi.coeff(1).re, 1.0 - z0.norm_sqr(), epsilon = 1e-15);
    }

    #[test]
    fn degree_ignores_trailing_zeros() {
        let p = Series::from_real(&[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(p.degree(), Some(1));
        assert!(Series::from_real(&[0.0, 0.0]).is_zero());
    }
}
