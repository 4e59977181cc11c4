//! Convergence-rate fits, cusp decay, divergence probes and the staged
//! spike construction.

use std::io::Write;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bieberbach::{bieberbach_from_basis, BieberbachPoly};
use crate::digest;
use crate::error::{Error, Result};
use crate::geometry::{ArcKind, ArcSpec, Corner, DomainSpec, C64};
use crate::gram::compute_gram;
use crate::orthopoly::{orthonormalize_cholesky, OrthoBasis, DEFAULT_TOL};
use crate::precision::{from_c64, to_c64, Real};
use crate::quadrature::{build_rule, RuleParams};
use crate::refmaps::ReferenceMap;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Wrap a result with the digest of the configuration that produced it.
pub fn artifact<C: Serialize, R: Serialize>(
    command: &str,
    config: &C,
    result: &R,
) -> serde_json::Value {
    serde_json::json!({
        "tool": "bieberbach",
        "version": VERSION,
        "command": command,
        "config_digest": digest::json_digest(config),
        "config": config,
        "result": result,
    })
}

/// Points for sample-based sup norms.
#[derive(Clone, Debug, Serialize)]
pub struct SampleSet {
    pub boundary_adjacent: usize,
    pub interior: usize,
    #[serde(skip)]
    pub points: Vec<C64>,
}

impl SampleSet {
    /// `nb` boundary samples pushed inward along the normal, plus `ni`
    /// uniform interior points from a fixed-seed generator.
    pub fn new(domain: &DomainSpec, nb: usize, ni: usize, seed: u64) -> Self {
        let diam = domain.diameter();
        let sing = domain.singular_vertices();
        let mut points = Vec::with_capacity(nb + ni);
        for (i, t, z) in domain.sample_with_index(nb) {
            if sing.iter().any(|v| (z - v).norm() < 1e-6 * diam) {
                continue;
            }
            let nrm = domain.inward_normal(i, t);
            if !nrm.norm().is_finite() || nrm.norm() == 0.0 {
                continue;
            }
            let mut d = 1e-4 * diam;
            for _ in 0..12 {
                let p = z + nrm * d;
                if domain.contains(p) {
                    points.push(p);
                    break;
                }
                d *= 0.5;
            }
        }
        let boundary_adjacent = points.len();
        let bb = domain.sample_boundary(1024);
        let (x0, x1) = bb
            .iter()
            .fold((f64::MAX, f64::MIN), |(a, b), z| (a.min(z.re), b.max(z.re)));
        let (y0, y1) = bb
            .iter()
            .fold((f64::MAX, f64::MIN), |(a, b), z| (a.min(z.im), b.max(z.im)));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut got = 0;
        let mut tries = 0;
        while got < ni && tries < 200 * ni.max(1) {
            tries += 1;
            let p = C64::new(rng.random_range(x0..x1), rng.random_range(y0..y1));
            if domain.contains(p) {
                points.push(p);
                got += 1;
            }
        }
        SampleSet {
            boundary_adjacent,
            interior: got,
            points,
        }
    }

    pub fn standard(domain: &DomainSpec) -> Self {
        SampleSet::new(domain, 2048, 512, 0x5eed)
    }
}

/// `max |phi - B_n|` over `samples` for each `n` in ascending `ns`.
pub fn sup_error_curve<T: Real>(
    basis: &OrthoBasis<T>,
    reference: &ReferenceMap,
    ns: &[usize],
    samples: &SampleSet,
) -> Result<Vec<(usize, f64)>> {
    if ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Invalid(
            "degree list must be strictly ascending".into(),
        ));
    }
    let phi: Vec<C64> = samples
        .points
        .iter()
        .map(|z| reference.phi64(*z))
        .collect::<Result<_>>()?;
    let z0 = reference.z0;
    ns.par_iter()
        .map(|&n| {
            let b = bieberbach_from_basis(basis, n, z0)?;
            let e = samples
                .points
                .iter()
                .zip(&phi)
                .map(|(z, f)| (b.eval_c64(*z) - f).norm())
                .fold(0.0, f64::max);
            Ok((n, e))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub c: f64,
    pub q: f64,
    pub r: f64,
    pub r2: f64,
    pub n_min: usize,
    pub n_max: usize,
}

impl RateFit {
    pub fn predict(&self, n: usize) -> f64 {
        self.c * self.q.powf((n as f64).powf(self.r))
    }
}

/// Least-squares line `y = a + b x`; returns `(a, b, R^2)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let ss_tot: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    let ss_res: f64 = x.iter().zip(y).map(|(u, v)| (v - a - b * u).powi(2)).sum();
    let r2 = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else {
        1.0
    };
    (a, b, r2)
}

/// Fit `e_n = C q^(n^r)` by a grid over `r` and a line in `n^r` for each.
pub fn fit_rate(curve: &[(usize, f64)]) -> Result<RateFit> {
    let pts: Vec<(f64, f64)> = curve
        .iter()
        .filter(|(_, e)| *e > 1e-14 && *e < 1.0)
        .map(|(n, e)| (*n as f64, e.ln()))
        .collect();
    if pts.len() < 6 {
        return Err(Error::TooFewPoints {
            got: pts.len(),
            need: 6,
        });
    }
    let y: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let mut best: Option<RateFit> = None;
    for k in 1..=19 {
        let r = 0.05 * k as f64;
        let x: Vec<f64> = pts.iter().map(|p| p.0.powf(r)).collect();
        let (a, b, r2) = linear_fit(&x, &y);
        if best.as_ref().is_none_or(|f| r2 > f.r2) {
            best = Some(RateFit {
                c: a.exp(),
                q: b.exp(),
                r,
                r2,
                n_min: pts[0].0 as usize,
                n_max: pts[pts.len() - 1].0 as usize,
            });
        }
    }
    Ok(best.expect("grid is nonempty"))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CuspFit {
    pub c_big: f64,
    pub c: f64,
    pub p: f64,
    pub r2: f64,
    pub points: usize,
}

/// Regress `ln E` on `-d^-(p-1)` for distances `d` and log-gaps `ln E`.
pub fn fit_cusp_values(dist: &[f64], log_gap: &[f64], p: f64) -> Result<CuspFit> {
    let pts: Vec<(f64, f64)> = dist
        .iter()
        .zip(log_gap)
        .filter(|(d, l)| **d > 0.0 && l.is_finite())
        .map(|(d, l)| (-d.powf(-(p - 1.0)), *l))
        .collect();
    if pts.len() < 4 {
        return Err(Error::TooFewPoints {
            got: pts.len(),
            need: 4,
        });
    }
    let x: Vec<f64> = pts.iter().map(|v| v.0).collect();
    let y: Vec<f64> = pts.iter().map(|v| v.1).collect();
    let (a, b, r2) = linear_fit(&x, &y);
    Ok(CuspFit {
        c_big: a.exp(),
        c: b,
        p,
        r2,
        points: pts.len(),
    })
}

/// Decay of `|phi(t) - phi(v)|` along the midline of cusp `cusp`, sampled at
/// local abscissae `ts`.
pub fn fit_cusp_decay(map: &ReferenceMap, cusp: usize, p: f64, ts: &[f64]) -> Result<CuspFit> {
    let cu = map.domain.cusps.get(cusp).ok_or(Error::OutOfRange {
        index: cusp,
        max: map.domain.cusps.len(),
    })?;
    let v = C64::new(cu.vertex[0], cu.vertex[1]);
    let pts = map.domain.cusp_approach_points(cusp, ts)?;
    let dist: Vec<f64> = pts.iter().map(|z| (z - v).norm()).collect();
    let logs: Vec<f64> = pts
        .iter()
        .map(|z| map.log_gap(*z, v))
        .collect::<Result<_>>()?;
    fit_cusp_values(&dist, &logs, p)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivergenceReport {
    pub x0: f64,
    pub xi: f64,
    pub precision_bits: u32,
    pub residual: f64,
    /// `(n, |B_n(x0)|)` for `n = 1..=max N`.
    pub values: Vec<(usize, f64)>,
    /// `(N, max_{n <= N} |B_n(x0)|)`.
    pub sup_table: Vec<(usize, f64)>,
    pub growth: f64,
    pub verdict: String,
}

/// Tabulate `|B_n(x0)|` beyond the rightmost real boundary point.
pub fn divergence_probe<T: Real>(
    domain: &DomainSpec,
    basis: &OrthoBasis<T>,
    x0: f64,
    ns: &[usize],
) -> Result<DivergenceReport> {
    if !domain.symmetric {
        return Err(Error::Precondition(
            "divergence probe needs a real-symmetric domain".into(),
        ));
    }
    let xi = domain.rightmost_real_point();
    if !(x0 > xi) {
        return Err(Error::Precondition(format!(
            "probe point {x0} must lie right of the vertex {xi}"
        )));
    }
    if ns.is_empty() || ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Invalid(
            "N list must be nonempty and strictly ascending".into(),
        ));
    }
    let nmax = *ns.last().expect("nonempty");
    if nmax > basis.degree + 1 {
        return Err(Error::OutOfRange {
            index: nmax,
            max: basis.degree + 1,
        });
    }
    let sub = basis.truncate(nmax - 1)?;
    let residual = sub.residual;
    sub.require(DEFAULT_TOL)?;
    let z0 = domain.z0();
    let x: Complex<T> = from_c64(C64::new(x0, 0.0));
    let values: Vec<(usize, f64)> = (1..=nmax)
        .into_par_iter()
        .map(|n| {
            Ok((
                n,
                to_c64(bieberbach_from_basis(basis, n, z0)?.eval(x)).norm(),
            ))
        })
        .collect::<Result<_>>()?;
    let mut sup_table = Vec::with_capacity(ns.len());
    for &nn in ns {
        let s = values[..nn].iter().map(|v| v.1).fold(0.0, f64::max);
        sup_table.push((nn, s));
    }
    let growth = sup_table[sup_table.len() - 1].1 / sup_table[0].1;
    let verdict = if growth >= 10.0 {
        "diverging"
    } else if growth < 2.0 {
        "bounded"
    } else {
        "inconclusive"
    };
    Ok(DivergenceReport {
        x0,
        xi,
        precision_bits: T::BITS,
        residual,
        values,
        sup_table,
        growth,
        verdict: verdict.into(),
    })
}

/// Cholesky basis of degree `n` with the default Gram rule for `T`.
pub fn basis_for<T: Real>(domain: &DomainSpec, n: usize) -> Result<OrthoBasis<T>> {
    let prec = crate::precision::Precision::from_bits(T::BITS).expect("supported precision");
    let rule = build_rule::<T>(domain, &RuleParams::for_gram(n, prec))?;
    orthonormalize_cholesky(&compute_gram(domain, &rule, n)?)
}

/// Stored polynomial and point for an independent re-check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub point: f64,
    pub threshold: f64,
    pub value: f64,
    pub center: [f64; 2],
    /// Coefficients of `(z - center)^k`, rounded to double.
    pub coeffs: Vec<[f64; 2]>,
}

impl Certificate {
    fn from_poly<T: Real>(b: &BieberbachPoly<T>, point: f64, threshold: f64) -> Self {
        let p = b.poly.to_c64();
        Certificate {
            point,
            threshold,
            value: b.eval_c64(C64::new(point, 0.0)).norm(),
            center: [p.center.re, p.center.im],
            coeffs: p.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
    }

    /// Re-evaluate the stored polynomial and compare against the threshold.
    pub fn verify(&self) -> bool {
        let u = C64::new(self.point - self.center[0], -self.center[1]);
        let mut acc = C64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * u + C64::new(c[0], c[1]);
        }
        acc.norm() > self.threshold
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KeldyshStage {
    pub stage: usize,
    pub xi: f64,
    pub xi_next: f64,
    pub n: usize,
    pub certificate: Certificate,
    /// Arc parameter at which the spike to `xi_next` leaves the boundary.
    pub spike_param: f64,
    pub stability: f64,
    pub stability_bound: f64,
    pub next_domain_hash: String,
    #[serde(skip)]
    pub next_domain: DomainSpec,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct KeldyshConfig {
    pub stages: usize,
    pub budget: usize,
    /// First gap `xi_2 - xi_1`; later gaps halve.
    pub step: f64,
    /// Initial spike parameter, multiplied by `thinning` until the
    /// stability bound holds.
    pub spike_param: f64,
    pub thinning: f64,
    pub max_thinning: usize,
}

impl Default for KeldyshConfig {
    fn default() -> Self {
        KeldyshConfig {
            stages: 1,
            budget: 120,
            step: 0.2,
            spike_param: 0.05,
            thinning: 0.1,
            max_thinning: 16,
        }
    }
}

/// `max |B_{n,a} - B_{n,b}|` over `points` for `1 <= n <= n_max`.
pub fn stability_gap<T: Real>(
    a: &OrthoBasis<T>,
    b: &OrthoBasis<T>,
    n_max: usize,
    z0: C64,
    points: &[C64],
) -> Result<f64> {
    (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let pa = bieberbach_from_basis(a, n, z0)?;
            let pb = bieberbach_from_basis(b, n, z0)?;
            Ok(points
                .iter()
                .map(|z| (pa.eval_c64(*z) - pb.eval_c64(*z)).norm())
                .fold(0.0, f64::max))
        })
        .collect::<Result<Vec<f64>>>()
        .map(|v| v.into_iter().fold(0.0, f64::max))
}

/// Samples of the closed unit disk.
pub fn unit_disk_samples() -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0)];
    for i in 1..=16 {
        let r = i as f64 / 16.0;
        for j in 0..64 {
            out.push(C64::from_polar(r, std::f64::consts::TAU * j as f64 / 64.0));
        }
    }
    out
}

/// Sub-arc of a segment or circular arc between parameters `t0 < t1`.
fn sub_arc(a: &ArcSpec, p: C64, q: C64, t_tangent: f64) -> Result<ArcSpec> {
    match a.kind {
        ArcKind::Segment { .. } => Ok(ArcSpec::segment(p, q)),
        ArcKind::Circular { .. } => {
            let tangent = a.eval(t_tangent).1;
            Ok(ArcSpec::circular(p, q, ((q - p) / tangent).arg()))
        }
        _ => Err(Error::Precondition(
            "spike construction needs segment or circular arcs at the vertex".into(),
        )),
    }
}

fn interior_angle(d_in: C64, d_out: C64) -> f64 {
    let a = (-d_in / d_out).arg();
    let a = if a <= 0.0 {
        a + std::f64::consts::TAU
    } else {
        a
    };
    a / std::f64::consts::PI
}

/// Attach a thin spike from `P` (at parameter `tp` on the arc leaving the
/// rightmost real vertex) to `xi_next`, symmetric in the real axis.
pub fn spike_domain(domain: &DomainSpec, xi_next: f64, tp: f64) -> Result<DomainSpec> {
    let xi = domain.rightmost_real_point();
    let v = C64::new(xi, 0.0);
    let out_i = domain
        .arcs
        .iter()
        .position(|a| (a.start() - v).norm() < 1e-12)
        .ok_or_else(|| Error::Precondition("no arc leaves the rightmost vertex".into()))?;
    let in_i = domain
        .arcs
        .iter()
        .position(|a| (a.end() - v).norm() < 1e-12)
        .ok_or_else(|| Error::Precondition("no arc ends at the rightmost vertex".into()))?;
    let a_out = &domain.arcs[out_i];
    let a_in = &domain.arcs[in_i];
    let p = a_out.point(tp);
    let pb = p.conj();
    let tip = C64::new(xi_next, 0.0);
    let upper = sub_arc(a_out, p, a_out.end(), tp)?;
    let lower = sub_arc(a_in, a_in.start(), pb, 0.0)?;

    let n = domain.arcs.len();
    let mut arcs = vec![ArcSpec::segment(tip, p), upper];
    let mut k = (out_i + 1) % n;
    while k != in_i {
        arcs.push(domain.arcs[k].clone());
        k = (k + 1) % n;
    }
    arcs.push(lower);
    arcs.push(ArcSpec::segment(pb, tip));

    let mut corners: Vec<Corner> = domain
        .corners
        .iter()
        .filter(|c| (C64::new(c.vertex[0], c.vertex[1]) - v).norm() > 1e-12)
        .cloned()
        .collect();
    let m = arcs.len();
    for (j, z) in [(1usize, p), (m - 1, pb), (0, tip)] {
        let d_out = arcs[j].eval(0.0).1;
        let d_in = arcs[(j + m - 1) % m].eval(1.0).1;
        corners.push(Corner {
            vertex: [z.re, z.im],
            alpha: interior_angle(d_in, d_out),
        });
    }
    let name = format!("{}+spike", domain.name);
    DomainSpec::build(
        &name,
        arcs,
        vec![],
        corners,
        domain.z0(),
        domain.symmetric,
        None,
    )
}

/// Boundary samples of `inner` lie in the closure of `outer`.
pub fn check_containment(inner: &DomainSpec, outer: &DomainSpec) -> Result<()> {
    for z in inner.sample_boundary(1024) {
        if outer.distance_to_boundary(z) < 1e-9 {
            continue;
        }
        if !outer.contains(z) {
            return Err(Error::Containment(format!(
                "boundary point {z} of '{}' lies outside '{}'",
                inner.name, outer.name
            )));
        }
    }
    Ok(())
}

/// Staged search: on `G_m` find `n_m` with `|B_{n_m}(xi_{m+1})| > 2m`, then
/// grow `G_{m+1}` by a spike to `xi_{m+1}`, thin enough that Bieberbach
/// polynomials up to `n_m` move by less than `2^-(m+1)` on the unit disk.
pub fn keldysh_iterate<T: Real>(
    start: &DomainSpec,
    cfg: &KeldyshConfig,
) -> Result<Vec<KeldyshStage>> {
    if cfg.stages > 3 {
        return Err(Error::Invalid("at most 3 stages".into()));
    }
    let z0 = start.z0();
    let disk = unit_disk_samples();
    let mut out = Vec::new();
    let mut g = start.clone();
    let mut step = cfg.step;
    for m in 1..=cfg.stages {
        let xi = g.rightmost_real_point();
        let xi_next = xi + step;
        let target = 2.0 * m as f64;
        let x: Complex<T> = from_c64(C64::new(xi_next, 0.0));

        let mut found: Option<(usize, OrthoBasis<T>, BieberbachPoly<T>)> = None;
        let mut chunk = 30.min(cfg.budget);
        let mut lo = 1;
        while found.is_none() {
            let basis = basis_for::<T>(&g, chunk - 1)?;
            basis.require(DEFAULT_TOL)?;
            for n in lo..=chunk {
                let b = bieberbach_from_basis(&basis, n, z0)?;
                if to_c64(b.eval(x)).norm() > target {
                    found = Some((n, basis.clone(), b));
                    break;
                }
            }
            if found.is_none() {
                if chunk >= cfg.budget {
                    return Err(Error::BudgetExhausted {
                        budget: cfg.budget,
                        msg: format!("stage {m}: |B_n({xi_next})| stayed below {target}"),
                    });
                }
                lo = chunk + 1;
                chunk = (chunk + 30).min(cfg.budget);
            }
        }
        let (n_m, basis, b) = found.expect("loop exits with a hit");
        let certificate = Certificate::from_poly(&b, xi_next, target);

        let bound = 0.5f64.powi(m as i32 + 1);
        let mut tp = cfg.spike_param;
        let mut accepted = None;
        for _ in 0..=cfg.max_thinning {
            let next = spike_domain(&g, xi_next, tp)?;
            check_containment(&g, &next)?;
            let nb = basis_for::<T>(&next, n_m.saturating_sub(1).max(1))?;
            let gap = stability_gap(&basis, &nb, n_m, z0, &disk)?;
            log::debug!("stage {m}: spike parameter {tp:e} gives gap {gap:e}");
            if gap < bound {
                accepted = Some((next, gap));
                break;
            }
            tp *= cfg.thinning;
        }
        let (next, gap) = accepted.ok_or_else(|| Error::BudgetExhausted {
            budget: cfg.max_thinning,
            msg: format!("stage {m}: spike thinning did not reach the stability bound {bound}"),
        })?;
        out.push(KeldyshStage {
            stage: m,
            xi,
            xi_next,
            n: n_m,
            certificate,
            spike_param: tp,
            stability: gap,
            stability_bound: bound,
            next_domain_hash: next.id_hash.clone(),
            next_domain: next.clone(),
        });
        g = next;
        step *= 0.5;
    }
    Ok(out)
}

pub fn write_curve_csv<W: Write>(
    mut out: W,
    header: &str,
    rows: &[(usize, f64)],
) -> std::io::Result<()> {
    writeln!(out, "{header}")?;
    for (n, v) in rows {
        writeln!(out, "{n},{v:e}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::gallery;
    use crate::precision::Dd;
    use crate::refmaps;

    #[test]
    fn rate_fit_recovers_its_model() {
        let curve: Vec<(usize, f64)> = (2..40)
            .map(|n| (n, 2.0 * 0.5f64.powf((n as f64).sqrt())))
            .collect();
        let f = fit_rate(&curve).unwrap();
        assert!((f.r - 0.5).abs() < 1e-9);
        assert!((f.c - 2.0).abs() < 1e-9 && (f.q - 0.5).abs() < 1e-9);
        let geo: Vec<(usize, f64)> = (1..60).map(|n| (n, 3.0 * 0.9f64.powi(n as i32))).collect();
        assert!((fit_rate(&geo).unwrap().r - 0.95).abs() < 1e-9);
        assert!(fit_rate(&geo[..5]).is_err());
    }

    #[test]
    fn cusp_fit_recovers_its_model() {
        let ts: Vec<f64> = (0..7).map(|j| 0.2 * 0.5f64.powi(j)).collect();
        let logs: Vec<f64> = ts.iter().map(|t| 3f64.ln() - 2.0 / t).collect();
        let f = fit_cusp_values(&ts, &logs, 2.0).unwrap();
        assert!((f.c - 2.0).abs() < 1e-9 && (f.c_big - 3.0).abs() < 1e-9);
        assert!(fit_cusp_values(&ts[..3], &logs[..3], 2.0).is_err());
    }

    #[test]
    fn disk_curve_at_origin_is_exact() {
        let d = gallery::disk(1.0, C64::new(0.0, 0.0)).unwrap();
        let m = refmaps::disk_map(1.0, C64::new(0.0, 0.0)).unwrap();
        let b = basis_for::<Dd>(&d, 10).unwrap();
        let s = SampleSet::new(&d, 256, 64, 1);
        assert!(s.points.iter().all(|z| z.norm() < 1.0));
        let curve = sup_error_curve(&b, &m, &[1, 5, 11], &s).unwrap();
        assert!(curve.iter().all(|(_, e)| *e < 1e-13));
    }

    #[test]
    fn divergence_preconditions() {
        let d = gallery::by_name("lens").unwrap();
        let b = basis_for::<f64>(&d, 5).unwrap();
        assert!(divergence_probe(&d, &b, 0.6, &[2, 4]).is_err());
        let r = divergence_probe(&d, &b, 0.8, &[2, 4, 6]).unwrap();
        assert!(r.sup_table.windows(2).all(|w| w[1].1 >= w[0].1));
    }

    #[test]
    fn spike_domain_contains_lens() {
        let d = gallery::by_name("lens").unwrap();
        let s = spike_domain(&d, 0.8, 0.05).unwrap();
        check_containment(&d, &s).unwrap();
        assert_eq!(s.rightmost_real_point(), 0.8);
        assert!(check_containment(&s, &d).is_err());
    }

    #[test]
    fn nested_centered_disks_are_stable() {
        let a = gallery::disk(1.0, C64::new(0.0, 0.0)).unwrap();
        let b = gallery::disk(1.5, C64::new(0.0, 0.0)).unwrap();
        let ka = basis_for::<f64>(&a, 8).unwrap();
        let kb = basis_for::<f64>(&b, 8).unwrap();
        assert!(
            stability_gap(&ka, &kb, 9, C64::new(0.0, 0.0), &unit_disk_samples()).unwrap() < 1e-12
        );
    }

    #[test]
    fn zero_stages_is_empty() {
        let d = gallery::by_name("lens").unwrap();
        let cfg = KeldyshConfig {
            stages: 0,
            ..Default::default()
        };
        assert!(keldysh_iterate::<f64>(&d, &cfg).unwrap().is_empty());
    }
}
