//! Jordan domains described by ordered parametric boundary arcs.

mod arc;
pub mod config;
pub mod gallery;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

pub use arc::{cis, ArcKind, ArcSpec, Frame, C64};

use crate::digest;
use crate::error::{Error, Result};

/// Endpoint continuity tolerance between consecutive arcs.
pub const CLOSURE_TOL: f64 = 1e-14;
/// Default boundary sample size for the self-intersection test.
pub const DEFAULT_INTERSECTION_SAMPLE: usize = 512;

/// Interior zero angle at `vertex`, opening along `direction`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CuspAnnotation {
    pub vertex: [f64; 2],
    pub p: f64,
    #[serde(rename = "P")]
    pub big_p: f64,
    pub c1: f64,
    pub c2: f64,
    /// Unit vector along the cusp axis pointing into the domain.
    pub direction: [f64; 2],
    pub x_check: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Corner {
    pub vertex: [f64; 2],
    /// Interior angle divided by pi.
    pub alpha: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub name: String,
    pub arcs: Vec<ArcSpec>,
    #[serde(default)]
    pub cusps: Vec<CuspAnnotation>,
    #[serde(default)]
    pub corners: Vec<Corner>,
    pub z0: [f64; 2],
    #[serde(default)]
    pub symmetric: bool,
    /// Expansion center for the shifted power basis.
    pub center: [f64; 2],
    #[serde(skip)]
    pub id_hash: String,
}

impl DomainSpec {
    /// Assemble, validate, and hash a domain.
    pub fn build(
        name: &str,
        arcs: Vec<ArcSpec>,
        cusps: Vec<CuspAnnotation>,
        corners: Vec<Corner>,
        z0: C64,
        symmetric: bool,
        center: Option<C64>,
    ) -> Result<DomainSpec> {
        let mut d = DomainSpec {
            name: name.to_string(),
            arcs,
            cusps,
            corners,
            z0: [z0.re, z0.im],
            symmetric,
            center: [0.0, 0.0],
            id_hash: String::new(),
        };
        d.center = match center {
            Some(c) => [c.re, c.im],
            None => {
                let c = d.default_center();
                [c.re, c.im]
            }
        };
        d.validate()?;
        d.id_hash = digest::json_digest(&d);
        Ok(d)
    }

    pub fn z0(&self) -> C64 {
        C64::new(self.z0[0], self.z0[1])
    }

    pub fn center(&self) -> C64 {
        C64::new(self.center[0], self.center[1])
    }

    pub fn short_hash(&self) -> &str {
        &self.id_hash[..12.min(self.id_hash.len())]
    }

    /// Copy with a different base point, revalidated and rehashed.
    pub fn with_z0(&self, z0: C64) -> Result<DomainSpec> {
        DomainSpec::build(
            &self.name,
            self.arcs.clone(),
            self.cusps.clone(),
            self.corners.clone(),
            z0,
            self.symmetric,
            Some(self.center()),
        )
    }

    /// Bounding-box midpoint snapped to a 2^-10 grid.
    fn default_center(&self) -> C64 {
        let pts = self.sample_boundary(2048);
        let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for p in &pts {
            x0 = x0.min(p.re);
            x1 = x1.max(p.re);
            y0 = y0.min(p.im);
            y1 = y1.max(p.im);
        }
        let snap = |v: f64| (v * 1024.0).round() / 1024.0;
        C64::new(snap(0.5 * (x0 + x1)), snap(0.5 * (y0 + y1)))
    }

    pub fn boundary_point(&self, arc: usize, t: f64) -> Result<(C64, C64)> {
        let a = self.arcs.get(arc).ok_or(Error::OutOfRange {
            index: arc,
            max: self.arcs.len() - 1,
        })?;
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Arc {
                arc,
                msg: format!("parameter {t} outside [0, 1]"),
            });
        }
        Ok(a.eval(t))
    }

    pub fn validate(&self) -> Result<()> {
        if self.arcs.is_empty() {
            return Err(Error::Invalid("domain has no arcs".into()));
        }
        for (i, a) in self.arcs.iter().enumerate() {
            a.validate().map_err(|msg| Error::Arc { arc: i, msg })?;
        }
        let n = self.arcs.len();
        for i in 0..n {
            let gap = (self.arcs[i].end() - self.arcs[(i + 1) % n].start()).norm();
            if !(gap <= CLOSURE_TOL) {
                return Err(Error::NotClosed { arc: i, gap });
            }
        }
        for (k, cusp) in self.cusps.iter().enumerate() {
            if !(cusp.p > 1.0 && cusp.big_p >= cusp.p && cusp.c1 > 0.0 && cusp.c1 <= cusp.c2) {
                return Err(Error::Invalid(format!(
                    "cusp {k}: need P >= p > 1 and 0 < c1 <= c2"
                )));
            }
        }
        self.check_self_intersection(DEFAULT_INTERSECTION_SAMPLE)?;
        let w = self.winding_number(self.z0())?;
        if w != 1 {
            return Err(Error::OutsideDomain { winding: w });
        }
        if self.symmetric {
            self.check_symmetry()?;
        }
        Ok(())
    }

    /// Arc lengths by 16-panel, 16-point Gauss quadrature of |z'|.
    pub fn arc_lengths(&self) -> Vec<f64> {
        let (x, w) = crate::quadrature::gauss_legendre_f64(16);
        self.arcs
            .iter()
            .map(|a| {
                let mut s = 0.0;
                for p in 0..16 {
                    let (t0, t1) = (p as f64 / 16.0, (p + 1) as f64 / 16.0);
                    for (xi, wi) in x.iter().zip(&w) {
                        let t = t0 + (t1 - t0) * xi;
                        s += wi * (t1 - t0) * a.eval(t).1.norm();
                    }
                }
                s
            })
            .collect()
    }

    pub fn length(&self) -> f64 {
        self.arc_lengths().iter().sum()
    }

    /// Sample counts per arc for `n` total points, proportional to length.
    fn counts(&self, n: usize) -> Vec<usize> {
        let lens = self.arc_lengths();
        let total: f64 = lens.iter().sum();
        lens.iter()
            .map(|l| ((n as f64 * l / total).round() as usize).max(8))
            .collect()
    }

    /// Points at uniform parameter steps, each arc's start included, no duplicates.
    pub fn sample_boundary(&self, n: usize) -> Vec<C64> {
        self.sample_with_index(n)
            .into_iter()
            .map(|(_, _, z)| z)
            .collect()
    }

    /// Samples tagged with (arc index, parameter).
    pub fn sample_with_index(&self, n: usize) -> Vec<(usize, f64, C64)> {
        let mut out = Vec::with_capacity(n + 8 * self.arcs.len());
        for (i, (a, k)) in self.arcs.iter().zip(self.counts(n)).enumerate() {
            for j in 0..k {
                let t = j as f64 / k as f64;
                out.push((i, t, a.point(t)));
            }
        }
        out
    }

    pub fn diameter(&self) -> f64 {
        let pts = self.sample_boundary(512);
        let mut d: f64 = 0.0;
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                d = d.max((a - b).norm());
            }
        }
        d
    }

    /// Pairwise segment test on a polyline through `n` boundary samples.
    /// Segments sharing only an endpoint with identical coordinates are allowed.
    pub fn check_self_intersection(&self, n: usize) -> Result<()> {
        let s = self.sample_with_index(n);
        let m = s.len();
        let seg = |k: usize| {
            let (a, b) = (&s[k], &s[(k + 1) % m]);
            ((a.2, a.1 == 0.0), (b.2, b.1 == 0.0), a.0)
        };
        for i in 0..m {
            let (a, b, ai) = seg(i);
            for j in i + 2..m {
                if i == 0 && j == m - 1 {
                    continue;
                }
                let (c, d, aj) = seg(j);
                if segments_cross(a, b, c, d) {
                    return Err(Error::SelfIntersection { arc: ai, other: aj });
                }
            }
        }
        Ok(())
    }

    fn check_symmetry(&self) -> Result<()> {
        let ts = [0.0, 0.2, 0.5, 0.7, 1.0];
        let n = self.arcs.len();
        let scale = self
            .sample_boundary(64)
            .iter()
            .map(|z| z.norm())
            .fold(1.0, f64::max);
        let tol = 1e-12 * scale;
        let reindexed = (0..n).all(|i| {
            (0..n).any(|j| {
                ts.iter().all(|&t| {
                    (self.arcs[i].point(t).conj() - self.arcs[j].point(1.0 - t)).norm() <= tol
                })
            })
        });
        if reindexed {
            return Ok(());
        }
        for (i, _, z) in self.sample_with_index(256) {
            if self.distance_to_boundary(z.conj()) > tol {
                return Err(Error::Arc {
                    arc: i,
                    msg: "domain flagged symmetric but is not conjugation invariant".into(),
                });
            }
        }
        Ok(())
    }

    /// Winding number of the boundary about `z`, by adaptive argument tracking.
    pub fn winding_number(&self, z: C64) -> Result<i64> {
        let dist = self.distance_to_boundary(z);
        if !(dist > 1e-12) {
            return Err(Error::TooCloseToBoundary { dist });
        }
        let mut total = 0.0;
        for a in &self.arcs {
            let ts = [0.0, 0.25, 0.5, 0.75, 1.0];
            for w in ts.windows(2) {
                total += arg_change(a, z, w[0], w[1], a.point(w[0]), a.point(w[1]), 0);
            }
        }
        Ok((total / std::f64::consts::TAU).round() as i64)
    }

    pub fn contains(&self, z: C64) -> bool {
        matches!(self.winding_number(z), Ok(1))
    }

    /// Euclidean distance from `z` to the boundary.
    pub fn distance_to_boundary(&self, z: C64) -> f64 {
        self.arcs
            .iter()
            .map(|a| arc_distance(a, z))
            .fold(f64::INFINITY, f64::min)
    }

    /// Unit inward normal at arc `i`, parameter `t`.
    pub fn inward_normal(&self, i: usize, t: f64) -> C64 {
        let dz = self.arcs[i].eval(t).1;
        C64::i() * dz / dz.norm()
    }

    /// Largest real boundary point (for real-symmetric domains).
    pub fn rightmost_real_point(&self) -> f64 {
        let pts = self.sample_with_index(4096);
        let mut best = f64::MIN;
        let m = pts.len();
        for k in 0..m {
            let (i, t0, a) = pts[k];
            let (_, _, b) = pts[(k + 1) % m];
            if a.im == 0.0 {
                best = best.max(a.re);
            }
            if (a.im > 0.0) != (b.im > 0.0) && a.im != 0.0 && b.im != 0.0 {
                // Refine the crossing on this arc by bisection.
                let t1 = if pts[(k + 1) % m].0 == i {
                    pts[(k + 1) % m].1
                } else {
                    1.0
                };
                let arc = &self.arcs[i];
                let (mut lo, mut hi) = (t0, t1);
                let s0 = arc.point(lo).im > 0.0;
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if (arc.point(mid).im > 0.0) == s0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                best = best.max(arc.point(0.5 * (lo + hi)).re);
            }
        }
        best
    }

    /// Singular vertices: cusp and corner points.
    pub fn singular_vertices(&self) -> Vec<C64> {
        self.cusps
            .iter()
            .map(|c| C64::new(c.vertex[0], c.vertex[1]))
            .chain(
                self.corners
                    .iter()
                    .map(|c| C64::new(c.vertex[0], c.vertex[1])),
            )
            .collect()
    }

    /// Arc ends at `vertex` whose outgoing direction has positive component along `dir`:
    /// pairs (arc index, vertex is at t = 0).
    fn cusp_branches(&self, vertex: C64, dir: C64) -> Vec<(usize, bool)> {
        let mut out = Vec::new();
        for (i, a) in self.arcs.iter().enumerate() {
            for at_start in [true, false] {
                let (t, tin) = if at_start {
                    (0.0, 1e-4)
                } else {
                    (1.0, 1.0 - 1e-4)
                };
                if (a.point(t) - vertex).norm() > 1e-12 {
                    continue;
                }
                let away = a.point(tin) - vertex;
                if (away * dir.conj()).re > 0.0 {
                    out.push((i, at_start));
                }
            }
        }
        out
    }

    /// For each local abscissa `x`, the two boundary points at local
    /// coordinate `x` along the cusp axis.
    pub fn cusp_boundary_pairs(&self, cusp: usize, xs: &[f64]) -> Result<Vec<(C64, C64)>> {
        let cu = self.cusps.get(cusp).ok_or(Error::OutOfRange {
            index: cusp,
            max: self.cusps.len(),
        })?;
        let v = C64::new(cu.vertex[0], cu.vertex[1]);
        let d = C64::new(cu.direction[0], cu.direction[1]);
        let d = d / d.norm();
        let br = self.cusp_branches(v, d);
        if br.len() != 2 {
            return Err(Error::Invalid(format!(
                "cusp {cusp}: expected two boundary branches, found {}",
                br.len()
            )));
        }
        let local_x = |z: C64| ((z - v) * d.conj()).re;
        let find = |(i, at_start): (usize, bool), x: f64| -> Result<C64> {
            let a = &self.arcs[i];
            let par = |s: f64| if at_start { s } else { 1.0 - s };
            // March outward until the local abscissa passes x, then bisect.
            let mut hi = 1e-6;
            while local_x(a.point(par(hi))) < x {
                hi *= 1.5;
                if hi > 0.5 {
                    return Err(Error::Invalid(format!(
                        "cusp {cusp}: local abscissa {x} not reached on arc {i}"
                    )));
                }
            }
            let mut lo = 0.0;
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if local_x(a.point(par(mid))) < x {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok(a.point(par(0.5 * (lo + hi))))
        };
        xs.iter()
            .map(|&x| Ok((find(br[0], x)?, find(br[1], x)?)))
            .collect()
    }

    /// Interior points on the cusp midline at the given local abscissae.
    pub fn cusp_approach_points(&self, cusp: usize, xs: &[f64]) -> Result<Vec<C64>> {
        Ok(self
            .cusp_boundary_pairs(cusp, xs)?
            .into_iter()
            .map(|(a, b)| (a + b) * 0.5)
            .collect())
    }

    /// Checks `c1 x^P <= |y| <= c2 x^p` on `k` local abscissae in (0, x_check].
    pub fn check_cusp_envelope(&self, cusp: usize, k: usize) -> Result<bool> {
        let cu = &self.cusps[cusp];
        let v = C64::new(cu.vertex[0], cu.vertex[1]);
        let d = C64::new(cu.direction[0], cu.direction[1]);
        let d = d / d.norm();
        let xs: Vec<f64> = (1..=k).map(|j| cu.x_check * j as f64 / k as f64).collect();
        let pairs = self.cusp_boundary_pairs(cusp, &xs)?;
        Ok(xs.iter().zip(pairs).all(|(&x, (a, b))| {
            [a, b].iter().all(|z| {
                let y = ((z - v) * d.conj()).im.abs();
                cu.c1 * x.powf(cu.big_p) <= y * (1.0 + 1e-12)
                    && y <= cu.c2 * x.powf(cu.p) * (1.0 + 1e-12)
            })
        }))
    }

    pub fn digest_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("domain serializes")
    }
}

fn cross(a: C64, b: C64) -> f64 {
    a.re * b.im - a.im * b.re
}

/// Segment endpoints carry a flag marking arc junctions; two segments that
/// meet only at a common junction (a pinch point) do not count as crossing.
fn segments_cross(a: (C64, bool), b: (C64, bool), c: (C64, bool), d: (C64, bool)) -> bool {
    let same = |p: (C64, bool), q: (C64, bool)| p.1 && q.1 && (p.0 - q.0).norm() <= 1e-13;
    if same(a, c) || same(a, d) || same(b, c) || same(b, d) {
        return false;
    }
    let (a, b, c, d) = (a.0, b.0, c.0, d.0);
    let d1 = cross(b - a, c - a);
    let d2 = cross(b - a, d - a);
    let d3 = cross(d - c, a - c);
    let d4 = cross(d - c, b - c);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |p: C64, q: C64, r: C64, o: f64| {
        o == 0.0
            && r.re >= p.re.min(q.re)
            && r.re <= p.re.max(q.re)
            && r.im >= p.im.min(q.im)
            && r.im <= p.im.max(q.im)
    };
    on(a, b, c, d1) || on(a, b, d, d2) || on(c, d, a, d3) || on(c, d, b, d4)
}

fn arg_change(a: &ArcSpec, z: C64, t0: f64, t1: f64, p0: C64, p1: C64, depth: u32) -> f64 {
    let (u0, u1) = (p0 - z, p1 - z);
    if depth >= 48 || (p1 - p0).norm() <= 0.25 * u0.norm().min(u1.norm()) {
        return (u1 / u0).arg();
    }
    let tm = 0.5 * (t0 + t1);
    let pm = a.point(tm);
    arg_change(a, z, t0, tm, p0, pm, depth + 1) + arg_change(a, z, tm, t1, pm, p1, depth + 1)
}

fn arc_distance(a: &ArcSpec, z: C64) -> f64 {
    match &a.kind {
        ArcKind::Segment { .. } => {
            let (s, e) = (a.start(), a.end());
            let d = e - s;
            let t = (((z - s) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
            (s + d * t - z).norm()
        }
        ArcKind::Circle { sweep, .. } if sweep.abs() >= std::f64::consts::TAU - 1e-15 => {
            let (c, r) = a.circle_params().expect("circle");
            ((z - c).norm() - r).abs()
        }
        _ => sampled_distance(a, z),
    }
}

fn sampled_distance(a: &ArcSpec, z: C64) -> f64 {
    const K: usize = 256;
    let f = |t: f64| (a.point(t) - z).norm();
    let vals: Vec<f64> = (0..=K).map(|j| f(j as f64 / K as f64)).collect();
    let mut best = vals.iter().copied().fold(f64::INFINITY, f64::min);
    for j in 0..=K {
        let left = if j > 0 { vals[j - 1] } else { f64::INFINITY };
        let right = if j < K { vals[j + 1] } else { f64::INFINITY };
        if vals[j] <= left && vals[j] <= right {
            let lo = (j.saturating_sub(1)) as f64 / K as f64;
            let hi = ((j + 1).min(K)) as f64 / K as f64;
            best = best.min(golden_min(&f, lo, hi));
        }
    }
    best
}

fn golden_min(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..100 {
        if b - a < 1e-16 {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    f1.min(f2).min(f(a)).min(f(b))
}

/// Generic helper used by quadrature: position and velocity in working precision.
pub fn eval_arc<T: crate::precision::Real>(a: &ArcSpec, t: T) -> (Complex<T>, Complex<T>) {
    a.eval(t)
}
