//! Bieberbach polynomials: from the orthonormal basis via the kernel sum, and
//! directly as minimizers of `||P'||` under `P(z0) = 0`, `P'(z0) = 1`.

use std::io::Write;

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::C64;
use crate::gram::GramMatrix;
use crate::linalg::{lu_solve, Mat};
use crate::orthopoly::{AreaMeasure, OrthoBasis};
use crate::poly::Poly;
use crate::precision::{cnorm_sqr, from_c64, to_c64, Real};

/// Below this `S_n` the basis is treated as degenerate.
pub const S_MIN: f64 = 1e-300;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BuildMethod {
    Formula,
    Extremal,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BieberbachPoly<T: Real> {
    pub n: usize,
    pub z0: C64,
    /// `sum_{k<n} |K_k(z0)|^2`, or the reciprocal of the minimal `||P'||^2`.
    pub s_n: T,
    pub method: BuildMethod,
    pub poly: Poly<T>,
}

impl<T: Real> BieberbachPoly<T> {
    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        self.poly.eval(z)
    }

    pub fn eval_c64(&self, z: C64) -> C64 {
        self.poly.eval_c64(z)
    }

    pub fn derivative(&self) -> Poly<T> {
        self.poly.derivative()
    }

    /// Coefficients in powers of `z`.
    pub fn monomial_coeffs(&self) -> Vec<Complex<T>> {
        self.poly.to_monomial()
    }

    /// `(|B_n(z0)|, |B_n'(z0) - 1|)`.
    pub fn normalization_defect(&self) -> (f64, f64) {
        let z0 = from_c64(self.z0);
        let v = self.poly.eval(z0);
        let d = self.poly.derivative().eval(z0) - Complex::one();
        (cnorm_sqr(v).sqrt().to_f64(), cnorm_sqr(d).sqrt().to_f64())
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# n={}", self.n)?;
        writeln!(out, "# z0={},{}", self.z0.re, self.z0.im)?;
        writeln!(out, "# S_n={:e}", self.s_n.to_f64())?;
        writeln!(
            out,
            "# method={}",
            if self.method == BuildMethod::Formula {
                "formula"
            } else {
                "extremal"
            }
        )?;
        writeln!(out, "k,re,im")?;
        for (k, c) in self.monomial_coeffs().iter().enumerate() {
            writeln!(out, "{},{:e},{:e}", k, c.re.to_f64(), c.im.to_f64())?;
        }
        Ok(())
    }
}

/// Truncated kernel `sum_{k<n} conj(K_k(z0)) K_k(z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelPartialSum<T: Real> {
    pub n: usize,
    pub z0: C64,
    pub poly: Poly<T>,
}

impl<T: Real> KernelPartialSum<T> {
    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        self.poly.eval(z)
    }
}

fn check_n<T: Real>(basis: &OrthoBasis<T>, n: usize) -> Result<()> {
    if n > basis.degree + 1 {
        return Err(Error::OutOfRange {
            index: n,
            max: basis.degree + 1,
        });
    }
    Ok(())
}

pub fn kernel_partial_sum<T: Real>(
    basis: &OrthoBasis<T>,
    n: usize,
    z0: C64,
) -> Result<KernelPartialSum<T>> {
    check_n(basis, n)?;
    let zt: Complex<T> = from_c64(z0);
    let mut acc = Poly::zero(basis.center);
    for k in 0..n {
        let kk = basis.poly(k)?;
        acc = acc.add(&kk.scale(kk.eval(zt).conj()));
    }
    Ok(KernelPartialSum { n, z0, poly: acc })
}

pub fn partial_sum_s<T: Real>(basis: &OrthoBasis<T>, n: usize, z0: C64) -> Result<T> {
    check_n(basis, n)?;
    let zt: Complex<T> = from_c64(z0);
    let mut s = T::zero();
    for k in 0..n {
        s += cnorm_sqr(basis.eval_k(k, zt)?);
    }
    Ok(s)
}

/// `B_n = (1/S_n) sum_{k<n} conj(K_k(z0)) int_{z0}^z K_k`.
pub fn bieberbach_from_basis<T: Real>(
    basis: &OrthoBasis<T>,
    n: usize,
    z0: C64,
) -> Result<BieberbachPoly<T>> {
    if n == 0 {
        return Err(Error::OutOfRange {
            index: 0,
            max: basis.degree + 1,
        });
    }
    check_n(basis, n)?;
    let zt: Complex<T> = from_c64(z0);
    let kernel = kernel_partial_sum(basis, n, z0)?;
    let s_n = partial_sum_s(basis, n, z0)?;
    if !(s_n.to_f64() > S_MIN) {
        return Err(Error::DegenerateBasis { s: s_n.to_f64() });
    }
    let mut prim = kernel.poly.antiderivative();
    let at_z0 = prim.eval(zt);
    prim.coeffs[0] -= at_z0;
    let poly = prim.scale(Complex::new(s_n.recip(), T::zero()));
    Ok(BieberbachPoly {
        n,
        z0,
        s_n,
        method: BuildMethod::Formula,
        poly,
    })
}

/// Minimize `q^T M conj(q)` over derivative coefficients `q` (degree `< n`)
/// subject to `sum q_k (z0 - c)^k = 1`, through the bordered KKT system.
pub fn solve_extremal<T: Real>(
    gram: &GramMatrix<T>,
    n: usize,
    z0: C64,
) -> Result<BieberbachPoly<T>> {
    if n == 0 || n > gram.degree + 1 {
        return Err(Error::OutOfRange {
            index: n,
            max: gram.degree + 1,
        });
    }
    let c: Complex<T> = from_c64(gram.center);
    let u0 = from_c64::<T>(z0) - c;
    let mut v = Vec::with_capacity(n);
    let mut p = Complex::<T>::one();
    for _ in 0..n {
        v.push(p);
        p = p * u0;
    }
    let kkt = Mat::from_fn(n + 1, |i, j| match (i < n, j < n) {
        (true, true) => gram.get(i, j).conj(),
        (true, false) => v[i].conj(),
        (false, true) => v[j],
        (false, false) => Complex::zero(),
    });
    let mut rhs = vec![Complex::<T>::zero(); n + 1];
    rhs[n] = Complex::one();
    let sol = lu_solve(&kkt, &rhs)?;
    // the multiplier is minus the minimal norm, whose reciprocal is S_n
    let lambda = -sol[n].re;
    if !(lambda > T::zero()) {
        return Err(Error::Singular { pivot: n });
    }
    let deriv = Poly::new(c, sol[..n].to_vec());
    let mut prim = deriv.antiderivative();
    let at_z0 = prim.eval(u0 + c);
    prim.coeffs[0] -= at_z0;
    Ok(BieberbachPoly {
        n,
        z0,
        s_n: lambda.recip(),
        method: BuildMethod::Extremal,
        poly: prim,
    })
}

/// `R0_n = (pi S_n)^(-1/2)`.
pub fn inner_radius_estimate<T: Real>(basis: &OrthoBasis<T>, n: usize, z0: C64) -> Result<T> {
    if n == 0 {
        return Err(Error::OutOfRange {
            index: 0,
            max: basis.degree + 1,
        });
    }
    let s = partial_sum_s(basis, n, z0)?;
    Ok((T::pi() * s).sqrt().recip())
}

/// Both sides of `||phi' - B_n'||^2 = 1/S_n - pi R0^2`.
///
/// The left side is a discrete area integral of the reference derivative
/// `dphi`; the right side uses `S_n` at working precision.
pub fn l2_error_identity<T: Real>(
    basis: &OrthoBasis<T>,
    n: usize,
    z0: C64,
    dphi: impl Fn(C64) -> C64,
    r0: f64,
    measure: &AreaMeasure<f64>,
) -> Result<(f64, f64)> {
    let b = bieberbach_from_basis(basis, n, z0)?;
    let db = b.derivative();
    let mut lhs = 0.0;
    for (z, w) in measure.nodes.iter().zip(&measure.weights) {
        let bz: Complex<T> = db.eval(from_c64(*z));
        let d = dphi(*z) - to_c64(bz);
        lhs += d.norm_sqr() * w;
    }
    let r0t = T::from_f64(r0);
    let rhs = b.s_n.recip() - T::pi() * r0t * r0t;
    Ok((lhs, rhs.to_f64()))
}
