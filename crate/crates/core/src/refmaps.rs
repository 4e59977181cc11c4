//! Exact normalized conformal maps for validation domains.
//!
//! Each map is `g : G -> unit disk` in closed form (or by Newton inversion),
//! followed by the disk automorphism `m` that sends `g(z0)` to 0 and the
//! scaling `1 / m'(z0)`, so `phi(z0) = 0`, `phi'(z0) = 1` and
//! `R0 = 1 / |m'(z0)|`.

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{gallery, ArcKind, DomainSpec, C64};
use crate::precision::{cabs, cexp, cln, cnorm_sqr, from_c64, to_c64, Real};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MapKind {
    DiskMobius { radius: f64 },
    PsiImage { coeffs: Vec<f64> },
    Lune,
    Lens { xi: f64, alpha: f64 },
}

#[derive(Clone, Debug)]
pub struct ReferenceMap {
    pub kind: MapKind,
    pub z0: C64,
    pub r0: f64,
    pub domain: DomainSpec,
    /// Seeds for the Newton inversion of psi: `(w, psi(w))` on a polar grid.
    seeds: Vec<(C64, C64)>,
}

const NEWTON_MAX: usize = 100;
const CAUCHY_NODES: usize = 256;

pub fn disk_map(radius: f64, z0: C64) -> Result<ReferenceMap> {
    if !(z0.norm() < radius) {
        return Err(Error::OutsideDomain { winding: 0 });
    }
    ReferenceMap::new(MapKind::DiskMobius { radius }, gallery::disk(radius, z0)?)
}

/// Image of the unit disk under `psi(w) = sum coeffs[k-1] w^k`, with `z0 = psi(0) = 0`.
pub fn psi_image_map(coeffs: &[f64]) -> Result<ReferenceMap> {
    let domain = gallery::psi_image(coeffs)?;
    domain.check_self_intersection(4096)?;
    ReferenceMap::new(
        MapKind::PsiImage {
            coeffs: coeffs.to_vec(),
        },
        domain,
    )
}

pub fn lune_map(z0: C64) -> Result<ReferenceMap> {
    ReferenceMap::new(MapKind::Lune, gallery::lune(z0)?)
}

pub fn lens_map(xi: f64, alpha: f64, z0: C64) -> Result<ReferenceMap> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Invalid(format!(
            "lens angle factor {alpha} must lie in (0, 1)"
        )));
    }
    ReferenceMap::new(MapKind::Lens { xi, alpha }, gallery::lens(xi, alpha, z0)?)
}

/// Exterior Green function of the unit disk with pole at infinity.
pub fn green_disk_exterior(x: f64) -> Result<f64> {
    if !(x >= 1.0) {
        return Err(Error::Invalid(format!(
            "green function needs x >= 1, got {x}"
        )));
    }
    Ok(x.ln())
}

impl ReferenceMap {
    fn new(kind: MapKind, domain: DomainSpec) -> Result<Self> {
        let seeds = match &kind {
            MapKind::PsiImage { coeffs } => {
                let mut s = Vec::with_capacity(64 * 64);
                for i in 0..64 {
                    let r = (i as f64 + 0.5) / 64.0;
                    for j in 0..64 {
                        let w = C64::from_polar(r, std::f64::consts::TAU * j as f64 / 64.0);
                        s.push((w, psi_eval(coeffs, w).0));
                    }
                }
                s
            }
            _ => Vec::new(),
        };
        let mut m = ReferenceMap {
            kind,
            z0: domain.z0(),
            r0: 0.0,
            domain,
            seeds,
        };
        let (a, dg0) = m.raw::<f64>(m.z0)?;
        m.r0 = (1.0 - a.norm_sqr()) / dg0.norm();
        Ok(m)
    }

    /// Reference map for a gallery domain, when one exists.
    pub fn for_domain(domain: &DomainSpec) -> Result<Self> {
        let kind = match domain.name.as_str() {
            "disk" => match domain.arcs.first().map(|a| &a.kind) {
                Some(ArcKind::Circle { radius, center, .. }) if *center == [0.0, 0.0] => {
                    MapKind::DiskMobius { radius: *radius }
                }
                _ => {
                    return Err(Error::Precondition(
                        "disk reference needs a centered circle".into(),
                    ))
                }
            },
            "psi" => match domain.arcs.first().map(|a| &a.kind) {
                Some(ArcKind::Series { coeffs, .. }) => MapKind::PsiImage {
                    coeffs: coeffs.iter().map(|(_, c)| c[0]).collect(),
                },
                _ => {
                    return Err(Error::Precondition(
                        "psi reference needs a series arc".into(),
                    ))
                }
            },
            "lune" => MapKind::Lune,
            "lens" => match domain.corners.first() {
                Some(c) => MapKind::Lens {
                    xi: c.vertex[0],
                    alpha: c.alpha,
                },
                None => {
                    return Err(Error::Precondition(
                        "lens reference needs corner data".into(),
                    ))
                }
            },
            other => {
                return Err(Error::Precondition(format!(
                    "no reference map for domain '{other}'"
                )))
            }
        };
        ReferenceMap::new(kind, domain.clone())
    }

    /// `g(z)` and `g'(z)` for the unnormalized map onto the unit disk.
    fn raw<T: Real>(&self, z: Complex<T>) -> Result<(Complex<T>, Complex<T>)> {
        let one = Complex::<T>::one();
        let i = Complex::<T>::i();
        match &self.kind {
            MapKind::DiskMobius { radius } => {
                let r = T::from_f64(*radius);
                Ok((z / r, Complex::new(r.recip(), T::zero())))
            }
            MapKind::PsiImage { coeffs } => {
                let w = self.psi_inverse(coeffs, z)?;
                let (_, dpsi) = psi_eval_t(coeffs, w);
                Ok((w, one / dpsi))
            }
            MapKind::Lune => {
                let (u, du) = lune_u(z);
                if u.re > T::zero() {
                    let eta = cexp(-u);
                    let den = one + i * eta;
                    let g = (one - i * eta) / den;
                    let dg = i * eta * T::from_f64(2.0) / (den * den);
                    Ok((g, dg * du))
                } else {
                    let zeta = cexp(u);
                    let den = zeta + i;
                    let g = (zeta - i) / den;
                    let dg = i * zeta * T::from_f64(2.0) / (den * den);
                    Ok((g, dg * du))
                }
            }
            MapKind::Lens { xi, alpha } => {
                let xi = T::from_f64(*xi);
                let inv_a = T::from_f64(*alpha).recip();
                let den = Complex::new(xi, T::zero()) - z;
                let s = (z + one) / den;
                let ds = Complex::new(xi + T::one(), T::zero()) / (den * den);
                let big = cexp(cln(s) * inv_a);
                let dbig = big * inv_a / s;
                let g = (big - one) / (big + one);
                let dg = Complex::new(T::from_f64(2.0), T::zero()) / ((big + one) * (big + one));
                Ok((g, dg * dbig * ds))
            }
        }
    }

    fn psi_inverse<T: Real>(&self, coeffs: &[f64], z: Complex<T>) -> Result<Complex<T>> {
        let zf = to_c64(z);
        let seed = self
            .seeds
            .iter()
            .min_by(|a, b| (a.1 - zf).norm_sqr().total_cmp(&(b.1 - zf).norm_sqr()))
            .map(|s| s.0)
            .unwrap_or_default();
        let mut w: Complex<T> = from_c64(seed);
        let tol = T::epsilon() * T::from_f64(16.0);
        for _ in 0..NEWTON_MAX {
            let (p, dp) = psi_eval_t(coeffs, w);
            let step = (p - z) / dp;
            w -= step;
            if cabs(step) <= tol * (T::one() + cabs(w)) {
                let (p, dp) = psi_eval_t(coeffs, w);
                return Ok(w - (p - z) / dp);
            }
        }
        Err(Error::NoConvergence(format!(
            "psi inverse at {zf} after {NEWTON_MAX} Newton steps"
        )))
    }

    /// `(m(z), m'(z))` for the automorphism-composed map onto the unit disk,
    /// and `m'(z0)`.
    fn unit_map<T: Real>(&self, z: Complex<T>) -> Result<(Complex<T>, Complex<T>, Complex<T>)> {
        let (a, dg0) = self.raw(from_c64::<T>(self.z0))?;
        let (g, dg) = self.raw(z)?;
        let one = Complex::<T>::one();
        let k = T::one() - cnorm_sqr(a);
        let den = one - a.conj() * g;
        let m = (g - a) / den;
        let dm = dg * k / (den * den);
        let dm0 = dg0 / k;
        Ok((m, dm, dm0))
    }

    pub fn phi<T: Real>(&self, z: Complex<T>) -> Result<Complex<T>> {
        let (m, _, dm0) = self.unit_map(z)?;
        Ok(m / dm0)
    }

    pub fn dphi<T: Real>(&self, z: Complex<T>) -> Result<Complex<T>> {
        let (_, dm, dm0) = self.unit_map(z)?;
        Ok(dm / dm0)
    }

    pub fn phi64(&self, z: C64) -> Result<C64> {
        self.phi::<f64>(z)
    }

    pub fn dphi64(&self, z: C64) -> Result<C64> {
        self.dphi::<f64>(z)
    }

    /// `R0` in working precision.
    pub fn r0_t<T: Real>(&self) -> Result<T> {
        let (_, _, dm0) = self.unit_map(from_c64::<T>(self.z0))?;
        Ok(cabs(dm0).recip())
    }

    /// `ln |phi(z) - phi(v)|` for a boundary vertex `v`. On the lune at its
    /// cusp this is evaluated in logarithmic form and never underflows.
    pub fn log_gap(&self, z: C64, vertex: C64) -> Result<f64> {
        if let MapKind::Lune = self.kind {
            if vertex.norm() < 1e-300 {
                let (a, dg0) = self.raw::<f64>(self.z0)?;
                let (u, _) = lune_u(z);
                let (g, _) = self.raw::<f64>(z)?;
                let i = C64::i();
                // upper horn: g -> 1 with g - 1 = -2i e^-u / (1 + i e^-u)
                let (gv, ln_diff) = if u.re > 0.0 {
                    let eta = (-u).exp();
                    (
                        C64::new(1.0, 0.0),
                        std::f64::consts::LN_2 - u.re - (1.0 + i * eta).norm().ln(),
                    )
                } else {
                    let zeta = u.exp();
                    (
                        C64::new(-1.0, 0.0),
                        std::f64::consts::LN_2 + u.re - (zeta + i).norm().ln(),
                    )
                };
                let k = 1.0 - a.norm_sqr();
                let dm0 = dg0 / k;
                return Ok(ln_diff + k.ln()
                    - (1.0 - a.conj() * g).norm().ln()
                    - (1.0 - a.conj() * gv).norm().ln()
                    - dm0.norm().ln());
            }
        }
        let d = self.phi64(z)? - self.phi64(vertex)?;
        Ok(d.norm().ln())
    }

    /// `k`-th derivative by the trapezoid rule on a circle of radius
    /// `min(1e-2, dist/2)` around `z`.
    pub fn derivative_k(&self, k: usize, z: C64) -> Result<C64> {
        if k == 0 {
            return self.phi64(z);
        }
        let dist = self.domain.distance_to_boundary(z);
        if !self.domain.contains(z) || !(dist > 1e-10) {
            return Err(Error::TooCloseToBoundary { dist });
        }
        let r = (0.5 * dist).min(1e-2);
        let n = CAUCHY_NODES;
        let mut s = C64::zero();
        for j in 0..n {
            let th = std::f64::consts::TAU * j as f64 / n as f64;
            let e = C64::from_polar(1.0, th);
            s += self.phi64(z + e * r)? * C64::from_polar(1.0, -(k as f64) * th);
        }
        let fact: f64 = (1..=k).map(|x| x as f64).product();
        Ok(s * (fact / (n as f64 * r.powi(k as i32))))
    }
}

/// `u = 2 pi i (1/z - 1/2)` and `du/dz`; sends the lune onto `0 < Im u < pi`.
fn lune_u<T: Real>(z: Complex<T>) -> (Complex<T>, Complex<T>) {
    let one = Complex::<T>::one();
    let w = one / z;
    let tpi = Complex::new(T::zero(), T::pi().mul_pow2(1));
    let u = tpi * (w - Complex::new(T::from_f64(0.5), T::zero()));
    (u, -tpi * w * w)
}

fn psi_eval(coeffs: &[f64], w: C64) -> (C64, C64) {
    psi_eval_t(coeffs, w)
}

/// `psi(w) = sum c_k w^(k+1)` and its derivative, by Horner.
fn psi_eval_t<T: Real>(coeffs: &[f64], w: Complex<T>) -> (Complex<T>, Complex<T>) {
    let mut p = Complex::<T>::zero();
    for c in coeffs.iter().rev() {
        p = p * w + T::from_f64(*c);
    }
    (p * w, dp_of(coeffs, w))
}

fn dp_of<T: Real>(coeffs: &[f64], w: Complex<T>) -> Complex<T> {
    let mut acc = Complex::<T>::zero();
    for (k, c) in coeffs.iter().enumerate().rev() {
        acc = acc * w + T::from_f64(*c * (k as f64 + 1.0));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::Qd;

    fn fd_derivative(m: &ReferenceMap, z: C64) -> C64 {
        let h = 1e-6;
        (m.phi64(z + h).unwrap() - m.phi64(z - h).unwrap()) / (2.0 * h)
    }

    #[test]
    fn disk_radii() {
        assert_eq!(disk_map(1.0, C64::new(0.0, 0.0)).unwrap().r0, 1.0);
        assert!((disk_map(1.0, C64::new(0.5, 0.0)).unwrap().r0 - 0.75).abs() < 1e-15);
        assert!((disk_map(2.0, C64::new(1.0, 0.0)).unwrap().r0 - 1.5).abs() < 1e-15);
        assert!(disk_map(1.0, C64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn identity_disk_map() {
        let m = disk_map(1.0, C64::new(0.0, 0.0)).unwrap();
        let z = C64::new(0.3, -0.2);
        assert!((m.phi64(z).unwrap() - z).norm() < 1e-15);
        assert!((m.derivative_k(1, C64::new(0.0, 0.0)).unwrap() - 1.0).norm() < 1e-12);
        assert!(m.derivative_k(2, z).unwrap().norm() < 1e-10);
    }

    #[test]
    fn normalization_holds_everywhere() {
        let maps = [
            disk_map(1.0, C64::new(0.5, 0.0)).unwrap(),
            psi_image_map(&[1.0, 0.25]).unwrap(),
            lune_map(C64::new(gallery::LUNE_Z0, 0.0)).unwrap(),
            lens_map(0.6, std::f64::consts::FRAC_1_SQRT_2, C64::new(0.0, 0.0)).unwrap(),
            lens_map(0.6, 0.5, C64::new(0.0, 0.0)).unwrap(),
        ];
        for m in &maps {
            assert!(m.phi64(m.z0).unwrap().norm() < 1e-12, "{:?}", m.kind);
            assert!(
                (m.dphi64(m.z0).unwrap() - 1.0).norm() < 1e-12,
                "{:?}",
                m.kind
            );
            assert!((fd_derivative(m, m.z0) - 1.0).norm() < 1e-8, "{:?}", m.kind);
        }
    }

    #[test]
    fn boundary_modulus_is_r0() {
        let maps = [
            disk_map(1.0, C64::new(0.5, 0.0)).unwrap(),
            psi_image_map(&[1.0, 0.25]).unwrap(),
            lune_map(C64::new(gallery::LUNE_Z0, 0.0)).unwrap(),
            lens_map(0.6, std::f64::consts::FRAC_1_SQRT_2, C64::new(0.0, 0.0)).unwrap(),
        ];
        for m in &maps {
            let sing = m.domain.singular_vertices();
            let mut checked = 0;
            for z in m.domain.sample_boundary(256) {
                if sing.iter().any(|v| (z - v).norm() < 0.05) {
                    continue;
                }
                assert!(
                    (m.phi64(z).unwrap().norm() - m.r0).abs() < 1e-8,
                    "{:?} at {z}",
                    m.kind
                );
                checked += 1;
            }
            assert!(checked > 200);
            let inner = m.domain.z0() * 0.5 + m.domain.sample_boundary(7)[3] * 0.5;
            assert!(m.phi64(inner).unwrap().norm() < m.r0);
        }
    }

    #[test]
    fn psi_inverse_values() {
        let m = psi_image_map(&[1.0, 0.25]).unwrap();
        assert!((m.phi64(C64::new(1.25, 0.0)).unwrap() - 1.0).norm() < 1e-14);
        assert_eq!(m.r0, 1.0);
        // series reversion of w + w^2/4: w = sum (-1)^n C_n z^(n+1) / 4^n
        let z = 0.3f64;
        let mut w = 0.0;
        let mut cat = 1.0f64;
        for n in 0..40 {
            w += (-1f64).powi(n as i32) * cat * z.powi(n as i32 + 1) / 4f64.powi(n as i32);
            cat = cat * 2.0 * (2.0 * n as f64 + 1.0) / (n as f64 + 2.0);
        }
        assert!((m.phi64(C64::new(z, 0.0)).unwrap().re - w).abs() < 1e-12);
    }

    #[test]
    fn lune_decay_toward_cusp() {
        let m = lune_map(C64::new(gallery::LUNE_Z0, 0.0)).unwrap();
        let ts: Vec<f64> = (0..7).map(|j| 0.2 * 0.5f64.powi(j)).collect();
        let pts = m.domain.cusp_approach_points(0, &ts).unwrap();
        let logs: Vec<f64> = pts
            .iter()
            .map(|z| m.log_gap(*z, C64::new(0.0, 0.0)).unwrap())
            .collect();
        for w in logs.windows(2) {
            assert!(w[1] < w[0]);
        }
        // log-form agrees with direct subtraction while the gap is representable
        let direct = (m.phi64(pts[0]).unwrap() - m.phi64(C64::new(1e-9, 1e-4)).unwrap()).norm();
        assert!(((logs[0] - direct.ln()) / logs[0]).abs() < 1e-3);
        let z = m.domain.cusp_approach_points(0, &[0.01]).unwrap()[0];
        assert!(m.dphi64(z).unwrap().norm() < 1e-8);
    }

    #[test]
    fn cauchy_derivative_matches_chain_rule() {
        let m = lune_map(C64::new(gallery::LUNE_Z0, 0.0)).unwrap();
        let z = C64::new(1.4, 0.3);
        let a = m.derivative_k(1, z).unwrap();
        assert!((a - m.dphi64(z).unwrap()).norm() < 1e-10);
        let h = 1e-4;
        let fd2 = (m.dphi64(z + h).unwrap() - m.dphi64(z - h).unwrap()) / (2.0 * h);
        assert!((m.derivative_k(2, z).unwrap() - fd2).norm() < 1e-6);
        assert!(m.derivative_k(1, C64::new(0.25, 0.0)).is_err());
    }

    #[test]
    fn lens_quad_double_agrees_with_double() {
        let m = lens_map(0.6, std::f64::consts::FRAC_1_SQRT_2, C64::new(0.0, 0.0)).unwrap();
        let z = C64::new(0.3, 0.2);
        let hi = m.phi::<Qd>(from_c64(z)).unwrap();
        assert!((to_c64(hi) - m.phi64(z).unwrap()).norm() < 1e-14);
        let r0 = m.r0_t::<Qd>().unwrap();
        assert!((r0.to_f64() - m.r0).abs() < 1e-15);
    }

    #[test]
    fn green_function() {
        assert!((green_disk_exterior(2.0).unwrap() - 0.693147).abs() < 1e-6);
        assert_eq!(green_disk_exterior(1.0).unwrap(), 0.0);
        assert!((green_disk_exterior(std::f64::consts::E).unwrap() - 1.0).abs() < 1e-15);
        assert!(green_disk_exterior(0.5).is_err());
    }
}
