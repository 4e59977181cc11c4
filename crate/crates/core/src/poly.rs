//! Complex polynomials in a shifted power basis `sum c_k (z - center)^k`.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::precision::{from_c64, to_c64, Real};

#[derive(Clone, Debug, PartialEq)]
pub struct Poly<T: Real> {
    pub center: Complex<T>,
    pub coeffs: Vec<Complex<T>>,
}

impl<T: Real> Poly<T> {
    pub fn new(center: Complex<T>, coeffs: Vec<Complex<T>>) -> Self {
        Poly { center, coeffs }
    }

    pub fn zero(center: Complex<T>) -> Self {
        Poly {
            center,
            coeffs: vec![Complex::zero()],
        }
    }

    /// Formal degree (length of the coefficient vector minus one).
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        let u = z - self.center;
        let mut acc = Complex::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * u + c;
        }
        acc
    }

    pub fn eval_c64(&self, z: Complex<f64>) -> Complex<f64> {
        to_c64(self.eval(from_c64(z)))
    }

    pub fn derivative(&self) -> Self {
        let coeffs = if self.coeffs.len() <= 1 {
            vec![Complex::zero()]
        } else {
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * T::from_usize(k))
                .collect()
        };
        Poly {
            center: self.center,
            coeffs,
        }
    }

    /// Antiderivative vanishing at `center`.
    pub fn antiderivative(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Complex::zero());
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c / T::from_usize(k + 1));
        }
        Poly {
            center: self.center,
            coeffs,
        }
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Poly {
            center: self.center,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert!(
            self.center == other.center,
            "polynomials with different centers"
        );
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|k| {
                let a = self.coeffs.get(k).copied().unwrap_or_else(Complex::zero);
                let b = other.coeffs.get(k).copied().unwrap_or_else(Complex::zero);
                a + b
            })
            .collect();
        Poly {
            center: self.center,
            coeffs,
        }
    }

    /// Re-expand about a new center by repeated synthetic division.
    pub fn recenter(&self, new_center: Complex<T>) -> Self {
        let d = new_center - self.center;
        let mut a = self.coeffs.clone();
        let n = a.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let t = a[j + 1] * d;
                a[j] += t;
            }
        }
        Poly {
            center: new_center,
            coeffs: a,
        }
    }

    /// Coefficients in the plain monomial basis `sum a_k z^k`.
    pub fn to_monomial(&self) -> Vec<Complex<T>> {
        if self.center.is_zero() {
            return self.coeffs.clone();
        }
        self.recenter(Complex::zero()).coeffs
    }

    pub fn to_c64(&self) -> Poly<f64> {
        Poly {
            center: to_c64(self.center),
            coeffs: self.coeffs.iter().map(|c| to_c64(*c)).collect(),
        }
    }

    pub fn convert<U: Real>(&self) -> Poly<U> {
        let cv = |c: &Complex<T>| {
            let (re, im) = (c.re.limbs(), c.im.limbs());
            Complex::new(U::from_limbs(&re), U::from_limbs(&im))
        };
        Poly {
            center: cv(&self.center),
            coeffs: self.coeffs.iter().map(cv).collect(),
        }
    }

    pub fn monomial(center: Complex<T>, k: usize) -> Self {
        let mut coeffs = vec![Complex::zero(); k + 1];
        coeffs[k] = Complex::one();
        Poly { center, coeffs }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recenter_preserves_values() {
        let p = Poly::new(
            Complex::new(0.5, -0.25),
            vec![
                Complex::new(1.0, 2.0),
                Complex::new(-0.5, 0.0),
                Complex::new(0.0, 3.0),
            ],
        );
        let q = p.recenter(Complex::new(-1.0, 0.0));
        for z in [Complex::new(0.3, 0.1), Complex::new(-2.0, 1.0)] {
            assert!((p.eval(z) - q.eval(z)).norm() < 1e-12);
        }
    }

    #[test]
    fn antiderivative_differentiates_back() {
        let p = Poly::new(
            Complex::new(0.0, 0.0),
            vec![Complex::new(1.0, 0.0), Complex::new(2.0, 1.0)],
        );
        let q = p.antiderivative().derivative();
        assert_eq!(p.coeffs, q.coeffs);
    }
}
