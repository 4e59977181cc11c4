//! Dense complex linear algebra in working precision.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::precision::{cnorm_sqr, Real};

/// Square row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T: Real> {
    pub n: usize,
    pub data: Vec<Complex<T>>,
}

impl<T: Real> Mat<T> {
    pub fn zeros(n: usize) -> Self {
        Mat {
            n,
            data: vec![Complex::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex::one();
        }
        m
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Mat { n, data }
    }

    /// Leading `k x k` block.
    pub fn leading(&self, k: usize) -> Self {
        Mat::from_fn(k, |i, j| self[(i, j)])
    }
}

impl<T: Real> std::ops::Index<(usize, usize)> for Mat<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.n + j]
    }
}

impl<T: Real> std::ops::IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.n + j]
    }
}

/// Lower factor `L` with real positive diagonal and `A = L L^H`.
///
/// On breakdown returns the failing pivot index.
pub fn cholesky<T: Real>(a: &Mat<T>) -> std::result::Result<Mat<T>, usize> {
    let n = a.n;
    let mut l = Mat::zeros(n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= cnorm_sqr(l[(j, k)]);
        }
        if !(d > T::zero()) || !d.is_finite() {
            return Err(j);
        }
        let djj = d.sqrt();
        l[(j, j)] = Complex::new(djj, T::zero());
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(l)
}

/// Inverse of a lower-triangular matrix with nonzero diagonal.
pub fn lower_inverse<T: Real>(l: &Mat<T>) -> Mat<T> {
    let n = l.n;
    let mut x = Mat::zeros(n);
    for j in 0..n {
        x[(j, j)] = Complex::<T>::one() / l[(j, j)];
        for i in j + 1..n {
            let mut s = Complex::<T>::zero();
            for k in j..i {
                s += l[(i, k)] * x[(k, j)];
            }
            x[(i, j)] = -s / l[(i, i)];
        }
    }
    x
}

/// Solve `A x = b` by Gaussian elimination with partial pivoting.
pub fn lu_solve<T: Real>(a: &Mat<T>, b: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    let n = a.n;
    let mut m = a.clone();
    let mut x = b.to_vec();
    let scale = a
        .data
        .iter()
        .map(|v| cnorm_sqr(*v))
        .fold(T::zero(), |p, q| p.max(q));
    let tiny = scale * T::epsilon() * T::epsilon() * T::from_f64(1e-6);
    for k in 0..n {
        let mut piv = k;
        let mut best = cnorm_sqr(m[(k, k)]);
        for i in k + 1..n {
            let v = cnorm_sqr(m[(i, k)]);
            if v > best {
                best = v;
                piv = i;
            }
        }
        if !(best > tiny) {
            return Err(Error::Singular { pivot: k });
        }
        if piv != k {
            for j in 0..n {
                m.data.swap(k * n + j, piv * n + j);
            }
            x.swap(k, piv);
        }
        let inv = Complex::<T>::one() / m[(k, k)];
        for i in k + 1..n {
            let f = m[(i, k)] * inv;
            if f.is_zero() {
                continue;
            }
            for j in k..n {
                let t = f * m[(k, j)];
                m[(i, j)] -= t;
            }
            let t = f * x[k];
            x[i] -= t;
        }
    }
    for k in (0..n).rev() {
        let mut s = x[k];
        for j in k + 1..n {
            s -= m[(k, j)] * x[j];
        }
        x[k] = s / m[(k, k)];
    }
    Ok(x)
}

/// Solve `L L^H x = b` given the Cholesky factor.
pub fn cholesky_solve<T: Real>(l: &Mat<T>, b: &[Complex<T>]) -> Vec<Complex<T>> {
    let n = l.n;
    let mut y = b.to_vec();
    for i in 0..n {
        let mut s = y[i];
        for k in 0..i {
            s -= l[(i, k)] * y[k];
        }
        y[i] = s / l[(i, i)];
    }
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[(k, i)].conj() * y[k];
        }
        y[i] = s / l[(i, i)].conj();
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::Dd;

    fn hilbert(n: usize) -> Mat<Dd> {
        Mat::from_fn(n, |i, j| {
            Complex::new(Dd::ONE / Dd::from((i + j + 1) as f64), Dd::ZERO)
        })
    }

    #[test]
    fn cholesky_reconstructs_hilbert() {
        let a = hilbert(10);
        let l = cholesky(&a).unwrap();
        for i in 0..10 {
            for j in 0..10 {
                let mut s = Complex::<Dd>::zero();
                for k in 0..10 {
                    s += l[(i, k)] * l[(j, k)].conj();
                }
                assert!(crate::precision::cabs(s - a[(i, j)]).to_f64() < 1e-28);
            }
        }
    }

    #[test]
    fn cholesky_reports_pivot() {
        let mut a = Mat::<f64>::identity(3);
        a[(2, 2)] = Complex::new(-1.0, 0.0);
        assert_eq!(cholesky(&a).unwrap_err(), 2);
    }

    #[test]
    fn lu_and_cholesky_solves_agree() {
        let a = hilbert(6);
        let b: Vec<Complex<Dd>> = (0..6)
            .map(|k| Complex::new(Dd::from(k as f64), Dd::from(1.0)))
            .collect();
        let x1 = lu_solve(&a, &b).unwrap();
        let x2 = cholesky_solve(&cholesky(&a).unwrap(), &b);
        for (u, v) in x1.iter().zip(&x2) {
            assert!(crate::precision::cabs(u - v).to_f64() < 1e-20);
        }
    }

    #[test]
    fn lower_inverse_is_inverse() {
        let l = cholesky(&hilbert(5)).unwrap();
        let x = lower_inverse(&l);
        for i in 0..5 {
            for j in 0..5 {
                let mut s = Complex::<Dd>::zero();
                for k in 0..5 {
                    s += l[(i, k)] * x[(k, j)];
                }
                let e = if i == j {
                    Complex::new(Dd::ONE, Dd::ZERO)
                } else {
                    Complex::zero()
                };
                assert!(crate::precision::cabs(s - e).to_f64() < 1e-25);
            }
        }
    }
}
