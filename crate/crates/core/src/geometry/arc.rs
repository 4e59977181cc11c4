//! Closed-form boundary arcs, all parametrized over `t` in `[0, 1]`.

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::precision::{cexp, Real};

pub type C64 = Complex<f64>;

/// Rigid placement applied after evaluating the arc in its own frame.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub shift: [f64; 2],
    /// Rotation angle in radians.
    pub rotation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ArcKind {
    /// Straight segment.
    Segment { start: [f64; 2], end: [f64; 2] },
    /// Circular arc from `start` to `end` whose tangent at `start` is turned
    /// by `-bulge` from the chord; positive bulge lies to the right of travel.
    Circular {
        start: [f64; 2],
        end: [f64; 2],
        bulge: f64,
    },
    /// `center + radius * exp(i (start_angle + sweep t))`; negative sweep is clockwise.
    Circle {
        center: [f64; 2],
        radius: f64,
        start_angle: f64,
        sweep: f64,
    },
    /// `sum c_k w^k` with `w = exp(i (theta0 + sweep t))`; negative `k` allowed.
    Series {
        coeffs: Vec<(i32, [f64; 2])>,
        theta0: f64,
        sweep: f64,
    },
    /// Power-law arc leaving `vertex` tangentially: in the frame aligned with
    /// its tangent it reads `y = kappa * l^(1-p) * x^p`, ending at `other`.
    PowerCusp {
        vertex: [f64; 2],
        other: [f64; 2],
        kappa: f64,
        p: f64,
        vertex_at_start: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArcSpec {
    #[serde(flatten)]
    pub kind: ArcKind,
    #[serde(default)]
    pub reversed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<Frame>,
}

fn c<T: Real>(p: [f64; 2]) -> Complex<T> {
    Complex::new(T::from_f64(p[0]), T::from_f64(p[1]))
}

/// Angle in working precision; multiples of pi/2 given as `f64` are snapped
/// to their exact value so that closed curves close at working precision.
fn angle<T: Real>(x: f64) -> T {
    let k = (x / std::f64::consts::FRAC_PI_2).round();
    if k.abs() <= 16.0 && k * std::f64::consts::FRAC_PI_2 == x {
        T::pi().mul_pow2(-1) * T::from_f64(k)
    } else {
        T::from_f64(x)
    }
}

fn unit<T: Real>(theta: T) -> Complex<T> {
    let (s, co) = theta.sin_cos();
    Complex::new(co, s)
}

impl ArcSpec {
    pub fn new(kind: ArcKind) -> Self {
        ArcSpec {
            kind,
            reversed: false,
            frame: None,
        }
    }

    pub fn segment(a: C64, b: C64) -> Self {
        ArcSpec::new(ArcKind::Segment {
            start: [a.re, a.im],
            end: [b.re, b.im],
        })
    }

    pub fn circular(a: C64, b: C64, bulge: f64) -> Self {
        ArcSpec::new(ArcKind::Circular {
            start: [a.re, a.im],
            end: [b.re, b.im],
            bulge,
        })
    }

    pub fn circle(center: C64, radius: f64, start_angle: f64, sweep: f64) -> Self {
        ArcSpec::new(ArcKind::Circle {
            center: [center.re, center.im],
            radius,
            start_angle,
            sweep,
        })
    }

    /// Position and velocity at parameter `t`.
    pub fn eval<T: Real>(&self, t: T) -> (Complex<T>, Complex<T>) {
        let (tt, sign) = if self.reversed {
            (T::one() - t, -T::one())
        } else {
            (t, T::one())
        };
        let (z, dz) = self.kind.eval(tt);
        let dz = dz * sign;
        match &self.frame {
            None => (z, dz),
            Some(f) => {
                let rot = unit(angle::<T>(f.rotation));
                (c::<T>(f.shift) + rot * z, rot * dz)
            }
        }
    }

    pub fn point(&self, t: f64) -> C64 {
        self.eval(t).0
    }

    pub fn start(&self) -> C64 {
        self.point(0.0)
    }

    pub fn end(&self) -> C64 {
        self.point(1.0)
    }

    pub fn validate(&self) -> Result<(), String> {
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match &self.kind {
            ArcKind::Segment { start, end } => {
                if !finite(start) || !finite(end) || start == end {
                    return Err("degenerate segment".into());
                }
            }
            ArcKind::Circular { start, end, bulge } => {
                if !finite(start) || !finite(end) || start == end {
                    return Err("degenerate circular arc".into());
                }
                if !(bulge.abs() < std::f64::consts::PI) {
                    return Err(format!("bulge {bulge} must lie in (-pi, pi)"));
                }
            }
            ArcKind::Circle { radius, sweep, .. } => {
                if !(*radius > 0.0) || *sweep == 0.0 || sweep.abs() > std::f64::consts::TAU + 1e-12
                {
                    return Err("circle needs radius > 0 and 0 < |sweep| <= 2 pi".into());
                }
            }
            ArcKind::Series { coeffs, sweep, .. } => {
                if coeffs.is_empty() || *sweep == 0.0 {
                    return Err("series arc needs coefficients and a nonzero sweep".into());
                }
            }
            ArcKind::PowerCusp {
                vertex, other, p, ..
            } => {
                if vertex == other || !(*p > 1.0) {
                    return Err("power arc needs distinct endpoints and p > 1".into());
                }
            }
        }
        if let Some(f) = &self.frame {
            if !finite(&f.shift) || !f.rotation.is_finite() {
                return Err("non-finite frame".into());
            }
        }
        Ok(())
    }

    /// Center and radius if the arc lies on a circle (frame applied).
    pub fn circle_params(&self) -> Option<(C64, f64)> {
        let (c0, r) = match &self.kind {
            ArcKind::Circle { center, radius, .. } => (C64::new(center[0], center[1]), *radius),
            ArcKind::Circular { start, end, bulge } => {
                let s = C64::new(start[0], start[1]);
                let e = C64::new(end[0], end[1]);
                let l = (e - s).norm();
                let u = (e - s) / l;
                let m = (s + e) * 0.5;
                let r = l / (2.0 * bulge.sin().abs());
                (m + C64::i() * u * (l / (2.0 * bulge.tan())), r)
            }
            _ => return None,
        };
        Some(match &self.frame {
            None => (c0, r),
            Some(f) => (
                C64::new(f.shift[0], f.shift[1]) + C64::from_polar(1.0, f.rotation) * c0,
                r,
            ),
        })
    }
}

impl ArcKind {
    fn eval<T: Real>(&self, t: T) -> (Complex<T>, Complex<T>) {
        match self {
            ArcKind::Segment { start, end } => {
                let s = c::<T>(*start);
                let d = c::<T>(*end) - s;
                (s + d * t, d)
            }
            ArcKind::Circular { start, end, bulge } => {
                let s = c::<T>(*start);
                let d = c::<T>(*end) - s;
                let eb = unit(T::from_f64(*bulge));
                let den = eb * (T::one() - t) + t;
                let q = Complex::new(t, T::zero()) / den;
                let dq = eb / (den * den);
                (s + d * q, d * dq)
            }
            ArcKind::Circle {
                center,
                radius,
                start_angle,
                sweep,
            } => {
                let r = T::from_f64(*radius);
                let sw = angle::<T>(*sweep);
                let th = angle::<T>(*start_angle) + sw * t;
                let w = unit(th) * r;
                (c::<T>(*center) + w, Complex::new(-w.im * sw, w.re * sw))
            }
            ArcKind::Series {
                coeffs,
                theta0,
                sweep,
            } => {
                let sw = angle::<T>(*sweep);
                let w = unit(angle::<T>(*theta0) + sw * t);
                let mut z = Complex::<T>::zero();
                let mut dz = Complex::<T>::zero();
                for (k, ck) in coeffs {
                    let ck = c::<T>(*ck);
                    let wk = cpowi(w, *k);
                    z += ck * wk;
                    dz += ck * wk * T::from_f64(*k as f64);
                }
                (z, dz * Complex::new(T::zero(), sw))
            }
            ArcKind::PowerCusp {
                vertex,
                other,
                kappa,
                p,
                vertex_at_start,
            } => {
                let v = c::<T>(*vertex);
                let d = c::<T>(*other) - v;
                let (tau, dtau) = if *vertex_at_start {
                    (t, T::one())
                } else {
                    (T::one() - t, -T::one())
                };
                let k = T::from_f64(*kappa);
                let p = T::from_f64(*p);
                let norm = Complex::new(T::one(), k);
                let taup = if tau > T::zero() {
                    tau.powf(p)
                } else {
                    T::zero()
                };
                let taup1 = if tau > T::zero() {
                    tau.powf(p - T::one())
                } else {
                    T::zero()
                };
                let q = Complex::new(tau, k * taup) / norm;
                let dq = Complex::new(T::one(), k * p * taup1) / norm;
                (v + d * q, d * dq * dtau)
            }
        }
    }
}

fn cpowi<T: Real>(w: Complex<T>, k: i32) -> Complex<T> {
    let mut base = if k < 0 { Complex::<T>::one() / w } else { w };
    let mut e = k.unsigned_abs();
    let mut acc = Complex::one();
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base = base * base;
        e >>= 1;
    }
    acc
}

/// `exp(i theta)` at working precision.
pub fn cis<T: Real>(theta: T) -> Complex<T> {
    cexp(Complex::new(T::zero(), theta))
}
