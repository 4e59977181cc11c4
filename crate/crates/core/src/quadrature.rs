//! Composite Gauss–Legendre rules on the boundary, graded toward singular vertices.

use std::io::Write;

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::digest;
use crate::error::{Error, Result};
use crate::geometry::{ArcSpec, DomainSpec, C64};
use crate::precision::{Precision, Real};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuleParams {
    /// Gauss points per panel.
    pub order: usize,
    /// Uniform panels per arc before grading and refinement.
    pub panels: usize,
    pub grading_ratio: f64,
    pub grading_depth: usize,
    /// When set, panels are split until a polynomial of this total degree in
    /// `(z - c, conj(z - c))` is resolved at working precision.
    pub max_degree: Option<usize>,
}

impl Default for RuleParams {
    fn default() -> Self {
        RuleParams {
            order: 24,
            panels: 8,
            grading_ratio: 0.5,
            grading_depth: 40,
            max_degree: None,
        }
    }
}

impl RuleParams {
    pub fn new(order: usize, panels: usize, grading_ratio: f64) -> Self {
        RuleParams {
            order,
            panels,
            grading_ratio,
            ..Default::default()
        }
    }

    /// Rule for Gram moments up to degree `n`: integrands have degree `2n + 1`.
    pub fn for_gram(n: usize, precision: Precision) -> Self {
        let order = match precision {
            Precision::Double => 24,
            Precision::DoubleDouble => 32,
            Precision::QuadDouble => 48,
        };
        RuleParams {
            order,
            max_degree: Some(2 * n + 2),
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.order < 2 {
            return Err(Error::Invalid(format!(
                "quadrature order {} < 2",
                self.order
            )));
        }
        if self.panels < 1 {
            return Err(Error::Invalid("need at least one panel per arc".into()));
        }
        if !(self.grading_ratio > 0.0 && self.grading_ratio < 1.0) {
            return Err(Error::Invalid(format!(
                "grading ratio {} outside (0, 1)",
                self.grading_ratio
            )));
        }
        Ok(())
    }
}

/// Parameter sub-interval of one arc.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Panel {
    pub arc: usize,
    pub t0: f64,
    pub t1: f64,
}

#[derive(Clone, Debug)]
pub struct QuadratureRule<T: Real> {
    pub nodes: Vec<Complex<T>>,
    /// Gauss weight times dz/dt.
    pub weights: Vec<Complex<T>>,
    pub panels: Vec<Panel>,
    pub params: RuleParams,
    pub domain_hash: String,
}

/// Gauss–Legendre nodes and weights on `[0, 1]` in working precision.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    let (xf, _) = gauss_legendre_f64(n);
    let mut x = vec![T::zero(); n];
    let mut w = vec![T::zero(); n];
    let half = T::from_f64(0.5);
    let steps = match T::BITS {
        53 => 0,
        106 => 2,
        _ => 3,
    };
    for i in 0..n.div_ceil(2) {
        // Work on [-1, 1]; xf is on [0, 1].
        let mut xi = T::from_f64(2.0 * xf[i] - 1.0);
        for _ in 0..steps {
            let (p, dp) = legendre(n, xi);
            xi -= p / dp;
        }
        let (_, dp) = legendre(n, xi);
        let wi = T::from_f64(2.0) / ((T::one() - xi * xi) * dp * dp);
        x[i] = (T::one() + xi) * half;
        w[i] = wi * half;
        x[n - 1 - i] = (T::one() - xi) * half;
        w[n - 1 - i] = wi * half;
    }
    if n % 2 == 1 {
        x[n / 2] = half;
    }
    (x, w)
}

fn legendre<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for j in 2..=n {
        let jf = T::from_usize(j);
        let p2 = (T::from_usize(2 * j - 1) * x * p1 - T::from_usize(j - 1) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let dp = T::from_usize(n) * (x * p1 - p0) / (x * x - T::one());
    (p1, dp)
}

/// Double-precision Gauss–Legendre on `[0, 1]`, nodes ascending.
pub fn gauss_legendre_f64(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for k in 0..n.div_ceil(2) {
        let mut xi = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, xi);
            let dx = p / dp;
            xi -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, xi);
        let wi = 2.0 / ((1.0 - xi * xi) * dp * dp);
        // xi is the k-th largest root.
        x[n - 1 - k] = 0.5 * (1.0 + xi);
        w[n - 1 - k] = 0.5 * wi;
        x[k] = 0.5 * (1.0 - xi);
        w[k] = 0.5 * wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.5;
    }
    (x, w)
}

/// Largest admissible `omega / order` per panel for each working precision.
fn resolution<T: Real>() -> f64 {
    match T::BITS {
        53 => 0.65,
        106 => 0.45,
        _ => 0.3,
    }
}

fn graded_breaks(h: f64, ratio: f64, depth: usize) -> Vec<f64> {
    // Breakpoints in (0, h], descending away from the vertex.
    let mut b = vec![0.0];
    for k in (0..=depth).rev() {
        b.push(h * ratio.powi(k as i32));
    }
    b
}

fn arc_panels(domain: &DomainSpec, i: usize, p: &RuleParams) -> Vec<(f64, f64)> {
    let a = &domain.arcs[i];
    let sing = domain.singular_vertices();
    let near = |z: C64| sing.iter().any(|v| (v - z).norm() <= 1e-12);
    let (gs, ge) = (near(a.start()), near(a.end()));
    let count = if gs && ge { p.panels.max(2) } else { p.panels };
    let h = 1.0 / count as f64;
    let mut breaks: Vec<f64> = (0..=count).map(|k| k as f64 * h).collect();
    if gs {
        let g = graded_breaks(h, p.grading_ratio, p.grading_depth);
        breaks.splice(0..2, g);
    }
    if ge {
        let g: Vec<f64> = graded_breaks(h, p.grading_ratio, p.grading_depth)
            .into_iter()
            .rev()
            .map(|s| 1.0 - s)
            .collect();
        let n = breaks.len();
        breaks.splice(n - 2..n, g);
    }
    breaks.dedup();
    breaks.windows(2).map(|w| (w[0], w[1])).collect()
}

fn local_omega(a: &ArcSpec, c: C64, floor: f64, degree: f64, t0: f64, t1: f64) -> f64 {
    let mut om: f64 = 0.0;
    for k in 0..=4 {
        let t = t0 + (t1 - t0) * k as f64 / 4.0;
        let (z, dz) = a.eval(t);
        om = om.max(dz.norm() / (z - c).norm().max(floor));
    }
    degree * om * 0.5 * (t1 - t0)
}

/// Composite rule over every arc of `domain`.
pub fn build_rule<T: Real>(domain: &DomainSpec, params: &RuleParams) -> Result<QuadratureRule<T>> {
    params.validate()?;
    let (gx, gw) = gauss_legendre::<T>(params.order);
    let c = domain.center();
    let rmax = domain
        .sample_boundary(1024)
        .iter()
        .map(|z| (z - c).norm())
        .fold(0.0, f64::max);
    let floor = 0.3 * rmax;
    let limit = resolution::<T>() * params.order as f64;

    let mut panels = Vec::new();
    for i in 0..domain.arcs.len() {
        let mut stack: Vec<(f64, f64)> = arc_panels(domain, i, params);
        stack.reverse();
        while let Some((t0, t1)) = stack.pop() {
            let split = match params.max_degree {
                Some(d) => {
                    t1 - t0 > 1e-12
                        && local_omega(&domain.arcs[i], c, floor, d as f64, t0, t1) > limit
                }
                None => false,
            };
            if split {
                let tm = 0.5 * (t0 + t1);
                stack.push((tm, t1));
                stack.push((t0, tm));
            } else {
                panels.push(Panel { arc: i, t0, t1 });
            }
        }
    }

    let mut nodes = Vec::with_capacity(panels.len() * params.order);
    let mut weights = Vec::with_capacity(panels.len() * params.order);
    for pan in &panels {
        let a = &domain.arcs[pan.arc];
        let t0 = T::from_f64(pan.t0);
        let dt = T::from_f64(pan.t1) - t0;
        for (x, w) in gx.iter().zip(&gw) {
            let (z, dz) = a.eval(t0 + dt * *x);
            nodes.push(z);
            weights.push(dz * (*w * dt));
        }
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        panels,
        params: *params,
        domain_hash: domain.id_hash.clone(),
    })
}

/// Rule on a single arc, panels uniform, no grading.
pub fn arc_rule<T: Real>(
    arc: &ArcSpec,
    order: usize,
    panels: usize,
) -> (Vec<Complex<T>>, Vec<Complex<T>>) {
    let (gx, gw) = gauss_legendre::<T>(order);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let dt = T::one() / T::from_usize(panels);
    for p in 0..panels {
        let t0 = T::from_usize(p) * dt;
        for (x, w) in gx.iter().zip(&gw) {
            let (z, dz) = arc.eval(t0 + dt * *x);
            nodes.push(z);
            weights.push(dz * (*w * dt));
        }
    }
    (nodes, weights)
}

impl<T: Real> QuadratureRule<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `sum f(z, conj z) w` over all nodes.
    pub fn contour_integral<F>(&self, f: F) -> Result<Complex<T>>
    where
        F: Fn(Complex<T>, Complex<T>) -> Complex<T>,
    {
        let mut s = Complex::zero();
        for (k, (z, w)) in self.nodes.iter().zip(&self.weights).enumerate() {
            let v = f(*z, z.conj());
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFinite { node: k });
            }
            s += v * w;
        }
        Ok(s)
    }

    /// Area from `(1 / 2i) sum conj(z) w`.
    pub fn area(&self) -> T {
        let s = self.contour_integral(|_, zb| zb).expect("finite nodes");
        s.im.mul_pow2(-1)
    }

    pub fn weight_sum(&self) -> Complex<T> {
        self.weights.iter().fold(Complex::zero(), |a, w| a + w)
    }

    /// Digest of everything that determines the rule.
    pub fn digest(&self) -> String {
        digest::json_digest(&(T::BITS, &self.domain_hash, &self.params))
    }

    pub fn conjugated(&self) -> QuadratureRule<T> {
        QuadratureRule {
            nodes: self.nodes.iter().map(|z| z.conj()).collect(),
            weights: self.weights.iter().map(|w| -w.conj()).collect(),
            panels: self.panels.clone(),
            params: self.params,
            domain_hash: self.domain_hash.clone(),
        }
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "node_re,node_im,weight_re,weight_im")?;
        for (z, w) in self.nodes.iter().zip(&self.weights) {
            writeln!(
                out,
                "{},{},{},{}",
                z.re.to_f64(),
                z.im.to_f64(),
                w.re.to_f64(),
                w.im.to_f64()
            )?;
        }
        Ok(())
    }
}

/// Unit-weight helper used by tests and oracles.
pub fn unit<T: Real>() -> Complex<T> {
    Complex::one()
}
