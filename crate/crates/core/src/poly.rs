//! Complex polynomials in a shifted, scaled monomial basis.

use num_complex::Complex64;

/// `P(z) = sum_k d_k ((z - center) / scale)^k`.
///
/// The scaled coefficients `d_k` are what the approximation engine produces; the
/// Taylor coefficients at `center` are `d_k / scale^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    center: Complex64,
    scale: f64,
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new_scaled(center: Complex64, scale: f64, coeffs: Vec<Complex64>) -> Self {
        assert!(scale > 0.0, "polynomial scale must be positive");
        let coeffs = if coeffs.is_empty() { vec![Complex64::new(0.0, 0.0)] } else { coeffs };
        Self { center, scale, coeffs }
    }

    /// Polynomial with Taylor coefficients `c_k` at `center`.
    pub fn from_taylor(center: Complex64, coeffs: Vec<Complex64>) -> Self {
        Self::new_scaled(center, 1.0, coeffs)
    }

    /// Polynomial in `z` with real coefficients, centered at the origin.
    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::from_taylor(
            Complex64::new(0.0, 0.0),
            coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect(),
        )
    }

    pub fn zero(center: Complex64, scale: f64) -> Self {
        Self::new_scaled(center, scale, Vec::new())
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn scaled_coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Taylor coefficient of `(z - center)^k`.
    pub fn coefficient(&self, k: usize) -> Complex64 {
        self.coeffs
            .get(k)
            .map(|d| d / self.scale.powi(k as i32))
            .unwrap_or_default()
    }

    pub fn taylor_coefficients(&self) -> Vec<Complex64> {
        (0..self.coeffs.len()).map(|k| self.coefficient(k)).collect()
    }

    /// Largest `k` with a nonzero coefficient; zero for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|c| *c != Complex64::new(0.0, 0.0))
            .unwrap_or(0)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let t = (z - self.center) / self.scale;
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * t + c)
    }

    /// The same polynomial expressed about a new center and scale.
    pub fn rebase(&self, center: Complex64, scale: f64) -> Polynomial {
        // (z - p)/s = a u + b with u = (z - p')/s'
        let a = Complex64::new(scale / self.scale, 0.0);
        let b = (center - self.center) / self.scale;
        let n = self.coeffs.len();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for &d in self.coeffs.iter().rev() {
            // out <- out * (a u + b) + d
            let mut next = vec![Complex64::new(0.0, 0.0); n];
            for (k, &o) in out.iter().enumerate() {
                next[k] += o * b;
                if k + 1 < n {
                    next[k + 1] += o * a;
                }
            }
            next[0] += d;
            out = next;
        }
        Polynomial::new_scaled(center, scale, out)
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let o = other.rebase(self.center, self.scale);
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new_scaled(self.center, self.scale, out)
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        let o = other.rebase(self.center, self.scale);
        let n = self.coeffs.len().max(o.coeffs.len());
        let get = |v: &[Complex64], k: usize| v.get(k).copied().unwrap_or_default();
        Polynomial::new_scaled(
            self.center,
            self.scale,
            (0..n).map(|k| get(&self.coeffs, k) - get(&o.coeffs, k)).collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn coefficients_and_degree() {
        let p = Polynomial::new_scaled(c(0.0, 0.0), 2.0, vec![c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(p.degree(), 1);
        assert_eq!(p.coefficient(1), c(1.0, 0.0));
        assert_eq!(p.eval(c(2.0, 0.0)), c(3.0, 0.0));
        assert_eq!(Polynomial::zero(c(0.0, 0.0), 1.0).degree(), 0);
    }

    proptest! {
        #[test]
        fn rebase_preserves_values(
            coeffs in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..8),
            px in -1.0f64..1.0, py in -1.0f64..1.0, s in 0.3f64..3.0,
            zx in -1.0f64..1.0, zy in -1.0f64..1.0,
        ) {
            let p = Polynomial::new_scaled(c(0.1, -0.2), 1.3, coeffs.iter().map(|&(a, b)| c(a, b)).collect());
            let q = p.rebase(c(px, py), s);
            let z = c(zx, zy);
            let m = ((z - p.center()).norm() + (c(px, py) - p.center()).norm() + s) / p.scale();
            let bound: f64 = p.scaled_coefficients().iter().enumerate()
                .map(|(k, v)| v.norm() * m.powi(k as i32)).sum();
            prop_assert!((p.eval(z) - q.eval(z)).norm() <= 1e-13 * (1.0 + bound) * coeffs.len() as f64);
        }
    }

    #[test]
    fn product_matches_pointwise() {
        let p = Polynomial::from_real(&[1.0, 2.0, 3.0]);
        let q = Polynomial::new_scaled(c(0.5, 0.0), 2.0, vec![c(1.0, 1.0), c(-1.0, 0.5)]);
        let z = c(0.3, -0.7);
        assert!((p.mul(&q).eval(z) - p.eval(z) * q.eval(z)).norm() < 1e-14);
        assert!((p.sub(&q).eval(z) - (p.eval(z) - q.eval(z))).norm() < 1e-14);
    }
}
