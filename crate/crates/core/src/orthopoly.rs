//! Area-orthonormal polynomials `K_0..K_N` with positive leading coefficients.
//!
//! Two routes: Cholesky of the Gram matrix, and Arnoldi (repeated
//! multiplication by `z - c` followed by Gram-Schmidt) against a discrete
//! area measure. Coefficients live in the same shifted basis as the Gram
//! matrix.

use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, C64};
use crate::gram::{next_precision, GramMatrix};
use crate::linalg::{cholesky, lower_inverse};
use crate::poly::Poly;
use crate::precision::{cabs, cnorm_sqr, from_c64, to_c64, Real};
use crate::quadrature::gauss_legendre;

pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Cholesky,
    Arnoldi,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Cholesky => "cholesky",
            Method::Arnoldi => "arnoldi",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrthoBasis<T: Real> {
    pub degree: usize,
    pub method: Method,
    pub center: Complex<T>,
    /// `coeffs[n][k]` is the coefficient of `(z - center)^k` in `K_n`.
    pub coeffs: Vec<Vec<Complex<T>>>,
    /// Squared ratio of extreme pivots (Cholesky) or of extreme norms (Arnoldi).
    pub condition_estimate: f64,
    /// `max |<K_m, K_n> - delta_mn|` against the inner product used to build the basis.
    pub residual: f64,
}

impl<T: Real> OrthoBasis<T> {
    pub fn poly(&self, n: usize) -> Result<Poly<T>> {
        self.check_index(n)?;
        Ok(Poly::new(self.center, self.coeffs[n].clone()))
    }

    pub fn eval_k(&self, n: usize, z: Complex<T>) -> Result<Complex<T>> {
        self.check_index(n)?;
        let u = z - self.center;
        let mut acc = Complex::zero();
        for c in self.coeffs[n].iter().rev() {
            acc = acc * u + c;
        }
        Ok(acc)
    }

    pub fn eval_k_c64(&self, n: usize, z: C64) -> Result<C64> {
        self.eval_k(n, from_c64(z)).map(to_c64)
    }

    pub fn leading(&self, n: usize) -> Result<Complex<T>> {
        self.check_index(n)?;
        Ok(self.coeffs[n][n])
    }

    /// Plain monomial coefficients of `K_n`.
    pub fn monomial_coeffs(&self, n: usize) -> Result<Vec<Complex<T>>> {
        Ok(self.poly(n)?.to_monomial())
    }

    /// Largest imaginary part among all coefficients.
    pub fn max_imag(&self) -> f64 {
        self.coeffs
            .iter()
            .flatten()
            .map(|c| c.im.abs().to_f64())
            .fold(0.0, f64::max)
    }

    pub fn truncate(&self, n: usize) -> Result<OrthoBasis<T>> {
        self.check_index(n)?;
        Ok(OrthoBasis {
            degree: n,
            coeffs: self.coeffs[..=n].to_vec(),
            ..self.clone()
        })
    }

    /// Error unless the stored residual is within `tol`.
    pub fn require(&self, tol: f64) -> Result<&Self> {
        if self.residual <= tol {
            Ok(self)
        } else {
            Err(Error::InsufficientPrecision {
                residual: self.residual,
                tol,
            })
        }
    }

    /// Orthonormality residual against a Gram matrix on the same center.
    pub fn residual_against(&self, gram: &GramMatrix<T>) -> Result<f64> {
        if gram.degree < self.degree {
            return Err(Error::OutOfRange {
                index: self.degree,
                max: gram.degree,
            });
        }
        let mut worst = 0.0f64;
        for m in 0..=self.degree {
            for n in 0..=m {
                let v = gram.inner_product(&self.coeffs[m], &self.coeffs[n])?;
                let d = if m == n { v - Complex::one() } else { v };
                worst = worst.max(cabs(d).to_f64());
            }
        }
        Ok(worst)
    }

    /// Largest coefficient difference against another basis of equal degree.
    pub fn max_coeff_diff(&self, other: &OrthoBasis<T>) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| cabs(x - y).to_f64()))
            .fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# N={}", self.degree)?;
        writeln!(out, "# method={}", self.method)?;
        writeln!(out, "# residual={:e}", self.residual)?;
        let c = to_c64(self.center);
        writeln!(out, "# center={},{}", c.re, c.im)?;
        writeln!(out, "n,k,re,im")?;
        for (n, row) in self.coeffs.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                writeln!(out, "{},{},{:e},{:e}", n, k, v.re.to_f64(), v.im.to_f64())?;
            }
        }
        Ok(())
    }

    fn check_index(&self, n: usize) -> Result<()> {
        if n > self.degree {
            Err(Error::OutOfRange {
                index: n,
                max: self.degree,
            })
        } else {
            Ok(())
        }
    }
}

/// `K_n` = row `n` of `L^{-1}` where `M = L L^H`.
pub fn orthonormalize_cholesky<T: Real>(gram: &GramMatrix<T>) -> Result<OrthoBasis<T>> {
    let l = cholesky(&gram.matrix).map_err(|pivot| Error::NotPositiveDefinite {
        pivot,
        suggest: next_precision(T::BITS),
    })?;
    let inv = lower_inverse(&l);
    let n = gram.degree;
    let coeffs: Vec<Vec<Complex<T>>> = (0..=n)
        .map(|m| (0..=m).map(|k| inv[(m, k)]).collect())
        .collect();
    let diag: Vec<f64> = (0..=n).map(|i| l[(i, i)].re.to_f64()).collect();
    let hi = diag.iter().cloned().fold(0.0, f64::max);
    let lo = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut basis = OrthoBasis {
        degree: n,
        method: Method::Cholesky,
        center: from_c64(gram.center),
        coeffs,
        condition_estimate: (hi / lo).powi(2),
        residual: 0.0,
    };
    basis.residual = basis.residual_against(gram)?;
    Ok(basis)
}

/// Positive discrete area measure.
#[derive(Clone, Debug)]
pub struct AreaMeasure<T: Real> {
    pub nodes: Vec<Complex<T>>,
    pub weights: Vec<T>,
}

impl<T: Real> AreaMeasure<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total(&self) -> T {
        self.weights.iter().fold(T::zero(), |a, w| a + *w)
    }

    /// `sum w f conj(g)` over node values.
    pub fn inner(&self, f: &[Complex<T>], g: &[Complex<T>]) -> Complex<T> {
        let mut s = Complex::zero();
        for ((a, b), w) in f.iter().zip(g).zip(&self.weights) {
            s += a * b.conj() * *w;
        }
        s
    }

    /// Gauss in `r` times trapezoid in angle over a disk.
    pub fn polar_grid(center: C64, radius: f64, nr: usize, nt: usize) -> Self {
        let (x, w) = gauss_legendre::<T>(nr);
        let c: Complex<T> = from_c64(center);
        let r0 = T::from_f64(radius);
        let dth = T::pi().mul_pow2(1) / T::from_usize(nt);
        let mut nodes = Vec::with_capacity(nr * nt);
        let mut weights = Vec::with_capacity(nr * nt);
        for (xi, wi) in x.iter().zip(&w) {
            let r = r0 * *xi;
            for j in 0..nt {
                let (s, co) = (dth * T::from_usize(j)).sin_cos();
                nodes.push(c + Complex::new(co, s) * r);
                weights.push(*wi * r0 * r * dth);
            }
        }
        AreaMeasure { nodes, weights }
    }

    /// Fan of triangles from the expansion center to each boundary node.
    ///
    /// Requires the domain to be star-shaped about its center; the Jacobian
    /// `Im(conj(z - c) z')` must stay positive.
    pub fn fan(domain: &DomainSpec, order: usize, panels: usize, radial: usize) -> Result<Self> {
        let c: Complex<T> = from_c64(domain.center());
        let (gx, gw) = gauss_legendre::<T>(order);
        let (sx, sw) = gauss_legendre::<T>(radial);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let dt = T::one() / T::from_usize(panels);
        for arc in &domain.arcs {
            for p in 0..panels {
                let t0 = T::from_usize(p) * dt;
                for (x, w) in gx.iter().zip(&gw) {
                    let (z, dz) = arc.eval(t0 + dt * *x);
                    let u = z - c;
                    let jac = (u.conj() * dz).im * *w * dt;
                    if !(jac > T::zero()) {
                        return Err(Error::Precondition(format!(
                            "domain '{}' is not star-shaped about its center",
                            domain.name
                        )));
                    }
                    for (s, ws) in sx.iter().zip(&sw) {
                        nodes.push(c + u * *s);
                        weights.push(jac * *s * *ws);
                    }
                }
            }
        }
        Ok(AreaMeasure { nodes, weights })
    }

    /// The gallery lune through `w = 1/z`, which sends it to the strip
    /// `1/2 < Re w < 1`; the strip height is compactified by `Im w = tan(pi s / 2)`.
    pub fn lune_strip(na: usize, order: usize, panels: usize) -> Self {
        let (ax, aw) = gauss_legendre::<T>(na);
        let (sx, sw) = gauss_legendre::<T>(order);
        let half = T::from_f64(0.5);
        let hpi = T::pi().mul_pow2(-1);
        let ds = T::from_f64(2.0) / T::from_usize(panels);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for p in 0..panels {
            let s0 = T::from_usize(p) * ds - T::one();
            for (x, w) in sx.iter().zip(&sw) {
                let s = s0 + ds * *x;
                let (sn, cs) = (hpi * s).sin_cos();
                let y = sn / cs;
                let dy = hpi / (cs * cs) * *w * ds;
                for (a, wa) in ax.iter().zip(&aw) {
                    let wv = Complex::new(half + half * *a, y);
                    let r2 = cnorm_sqr(wv);
                    nodes.push(Complex::<T>::one() / wv);
                    weights.push(dy * *wa * half / (r2 * r2));
                }
            }
        }
        AreaMeasure { nodes, weights }
    }
}

/// Orthonormalize `1, u, u^2, ...` against `measure`, with `u = z - center`.
///
/// Each new vector is `u K_{n-1}` orthogonalized twice against the previous
/// ones; dividing by its norm leaves the leading coefficient real positive.
pub fn orthonormalize_arnoldi<T: Real>(
    domain: &DomainSpec,
    measure: &AreaMeasure<T>,
    n: usize,
) -> Result<OrthoBasis<T>> {
    let need = (n + 1) * (n + 1);
    if measure.len() < need {
        return Err(Error::TooFewPoints {
            got: measure.len(),
            need,
        });
    }
    if measure.weights.iter().any(|w| !(*w > T::zero())) {
        return Err(Error::Precondition(
            "area measure weights must be positive".into(),
        ));
    }
    let c: Complex<T> = from_c64(domain.center());
    let u: Vec<Complex<T>> = measure.nodes.iter().map(|z| z - c).collect();
    let total = measure.total();
    let k0 = total.sqrt().recip();
    let mut q: Vec<Vec<Complex<T>>> = vec![vec![Complex::new(k0, T::zero()); measure.len()]];
    let mut coeffs: Vec<Vec<Complex<T>>> = vec![vec![Complex::new(k0, T::zero())]];
    let mut norms = vec![1.0f64];
    let tiny = T::epsilon().sqrt() * T::epsilon().sqrt().sqrt();

    for m in 1..=n {
        let mut v: Vec<Complex<T>> = q[m - 1].iter().zip(&u).map(|(a, b)| a * b).collect();
        let mut cv: Vec<Complex<T>> = Vec::with_capacity(m + 1);
        cv.push(Complex::zero());
        cv.extend_from_slice(&coeffs[m - 1]);
        let before = measure.inner(&v, &v).re.sqrt();
        for _pass in 0..2 {
            for k in 0..m {
                let h = measure.inner(&v, &q[k]);
                for (vj, qj) in v.iter_mut().zip(&q[k]) {
                    *vj -= h * qj;
                }
                for (cj, kj) in cv.iter_mut().zip(&coeffs[k]) {
                    *cj -= h * kj;
                }
            }
        }
        let nrm = measure.inner(&v, &v).re.sqrt();
        if !(nrm > before * tiny) || !nrm.is_finite() {
            return Err(Error::RankDeficient { degree: m });
        }
        let inv = nrm.recip();
        q.push(v.iter().map(|x| x * inv).collect());
        coeffs.push(cv.iter().map(|x| x * inv).collect());
        norms.push(nrm.to_f64());
    }

    let mut worst = 0.0f64;
    for a in 0..=n {
        for b in 0..=a {
            let g = measure.inner(&q[a], &q[b]);
            let d = if a == b { g - Complex::one() } else { g };
            worst = worst.max(cabs(d).to_f64());
        }
    }
    let hi = norms[1..].iter().cloned().fold(1.0, f64::max);
    let lo = norms[1..].iter().cloned().fold(1.0, f64::min);
    Ok(OrthoBasis {
        degree: n,
        method: Method::Arnoldi,
        center: c,
        coeffs,
        condition_estimate: (hi / lo).powi(2),
        residual: worst,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct HullCheck {
    pub inside: bool,
    pub roots: Vec<C64>,
    /// Root farthest outside the hull and its signed distance (positive = outside).
    pub worst: Option<(C64, f64)>,
    pub tolerance: f64,
}

/// Roots of `K_n` via the balanced companion matrix, polished by Newton in
/// working precision.
pub fn roots<T: Real>(basis: &OrthoBasis<T>, n: usize) -> Result<Vec<C64>> {
    let p = basis.poly(n)?;
    if n == 0 {
        return Ok(vec![]);
    }
    let lead = p.coeffs[n];
    let b: Vec<C64> = p.coeffs.iter().map(|c| to_c64(*c / lead)).collect();
    let mut comp = DMatrix::<C64>::zeros(n, n);
    for k in 0..n {
        comp[(0, k)] = -b[n - 1 - k];
    }
    for k in 1..n {
        comp[(k, k - 1)] = C64::new(1.0, 0.0);
    }
    balance(&mut comp);
    let schur = nalgebra::linalg::Schur::try_new(comp, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::NoConvergence(format!("companion eigenvalues of K_{n}")))?;
    let (_, t) = schur.unpack();
    let dp = p.derivative();
    let c = to_c64(basis.center);
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut z: Complex<T> = from_c64(t[(k, k)] + c);
        let mut fz = cabs(p.eval(z));
        for _ in 0..4 {
            let d = dp.eval(z);
            if cabs(d).is_zero() {
                break;
            }
            let zn = z - p.eval(z) / d;
            let fn_ = cabs(p.eval(zn));
            if !(fn_ < fz) {
                break;
            }
            z = zn;
            fz = fn_;
        }
        out.push(to_c64(z));
    }
    Ok(out)
}

/// Diagonal similarity scaling by powers of two.
fn balance(a: &mut DMatrix<C64>) {
    let n = a.nrows();
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].l1_norm();
                    r += a[(i, j)].l1_norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let (mut cc, mut rr) = (c, r);
            while cc < rr / 2.0 {
                cc *= 2.0;
                rr /= 2.0;
                f *= 2.0;
            }
            while cc >= rr * 2.0 {
                cc /= 2.0;
                rr *= 2.0;
                f /= 2.0;
            }
            if (cc + rr) < 0.95 * s {
                done = false;
                for j in 0..n {
                    a[(i, j)] /= f;
                    a[(j, i)] *= f;
                }
            }
        }
    }
}

/// Convex hull (counterclockwise, no collinear points) by monotone chain.
pub fn convex_hull(points: &[C64]) -> Vec<C64> {
    let mut p: Vec<C64> = points.to_vec();
    p.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let cross = |o: C64, a: C64, b: C64| (a - o).re * (b - o).im - (a - o).im * (b - o).re;
    let mut hull: Vec<C64> = Vec::with_capacity(2 * p.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &C64>> = if pass == 0 {
            Box::new(p.iter())
        } else {
            Box::new(p.iter().rev())
        };
        for &z in iter {
            while hull.len() >= start + 2
                && cross(hull[hull.len() - 2], hull[hull.len() - 1], z) <= 0.0
            {
                hull.pop();
            }
            hull.push(z);
        }
        hull.pop();
    }
    hull
}

/// Signed distance outside a counterclockwise convex polygon (negative inside).
pub fn hull_excess(hull: &[C64], z: C64) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for k in 0..hull.len() {
        let a = hull[k];
        let b = hull[(k + 1) % hull.len()];
        let e = b - a;
        let d = -((e.re * (z - a).im - e.im * (z - a).re) / e.norm());
        worst = worst.max(d);
    }
    worst
}

/// Whether every root of `K_n` lies in the convex hull of a dense boundary
/// sample, up to `1e-6 * diam`.
pub fn zeros_in_hull<T: Real>(
    basis: &OrthoBasis<T>,
    domain: &DomainSpec,
    n: usize,
) -> Result<HullCheck> {
    if n == 0 {
        return Err(Error::Precondition("zeros need n >= 1".into()));
    }
    let rts = roots(basis, n)?;
    let hull = convex_hull(&domain.sample_boundary(4096));
    let tolerance = 1e-6 * domain.diameter();
    let mut worst: Option<(C64, f64)> = None;
    for &z in &rts {
        let d = hull_excess(&hull, z);
        if worst.is_none_or(|(_, w)| d > w) {
            worst = Some((z, d));
        }
    }
    let inside = worst.is_none_or(|(_, d)| d <= tolerance);
    Ok(HullCheck {
        inside,
        roots: rts,
        worst,
        tolerance,
    })
}
