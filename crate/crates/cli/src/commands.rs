use std::fs;
use std::path::{Path, PathBuf};

use bieberbach::bieberbach::{
    bieberbach_from_basis, inner_radius_estimate, solve_extremal, BieberbachPoly, BuildMethod,
};
use bieberbach::digest::json_digest;
use bieberbach::experiments::{
    self, divergence_probe, fit_cusp_values, fit_rate, keldysh_iterate, sup_error_curve,
    KeldyshConfig, SampleSet,
};
use bieberbach::geometry::{config::load_domain, gallery, DomainSpec, C64};
use bieberbach::gram::{compute_gram, GramMatrix};
use bieberbach::orthopoly::{
    orthonormalize_arnoldi, orthonormalize_cholesky, AreaMeasure, Method, OrthoBasis,
};
use bieberbach::quadrature::{build_rule, RuleParams};
use bieberbach::refmaps::ReferenceMap;
use bieberbach::{with_precision, Error, Precision, Real, Result};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Command, Common, SampleArgs};
use crate::cache::Cache;

pub struct Context {
    pub out: PathBuf,
    pub cache: Cache,
}

impl Context {
    fn write(
        &self,
        command: &str,
        domain: &DomainSpec,
        n: usize,
        ext: &str,
        bytes: &[u8],
    ) -> Result<()> {
        self.write_named(
            &format!("{command}-{}-{n}.{ext}", domain.short_hash()),
            bytes,
        )
    }

    fn write_named(&self, name: &str, bytes: &[u8]) -> Result<()> {
        fs::create_dir_all(&self.out)?;
        let path = self.out.join(name);
        fs::write(&path, bytes)?;
        println!("wrote {}", path.display());
        Ok(())
    }

    fn write_json<C: Serialize, R: Serialize>(
        &self,
        command: &str,
        domain: &DomainSpec,
        n: usize,
        config: &C,
        result: &R,
    ) -> Result<()> {
        let v = experiments::artifact(command, config, result);
        self.write(command, domain, n, "json", &to_bytes(&v))
    }

    /// Gram matrix of degree `n`, from the cache when a valid entry exists.
    fn gram<T: Real>(
        &self,
        domain: &DomainSpec,
        n: usize,
        params: &RuleParams,
    ) -> Result<GramMatrix<T>> {
        if let Some(g) = self.cache.lookup::<T>(&domain.id_hash, n, params) {
            return Ok(g);
        }
        let rule = build_rule::<T>(domain, params)?;
        let g = compute_gram(domain, &rule, n)?;
        if let Err(e) = self.cache.store(&g, params) {
            log::warn!("could not store Gram matrix in cache: {e}");
        }
        Ok(g)
    }

    fn basis<T: Real>(
        &self,
        domain: &DomainSpec,
        n: usize,
        common: &Common,
    ) -> Result<OrthoBasis<T>> {
        orthonormalize_cholesky(&self.gram::<T>(domain, n, &rule_params(common, n))?)
    }
}

fn to_bytes(v: &Value) -> Vec<u8> {
    let mut b = serde_json::to_vec_pretty(v).expect("JSON values serialize");
    b.push(b'\n');
    b
}

/// A config file path, or a gallery name when no such file exists.
pub fn resolve_domain(spec: &str, z0: Option<[f64; 2]>) -> Result<DomainSpec> {
    let path = Path::new(spec);
    let d = if path.is_file() {
        load_domain(path)?
    } else if gallery::GALLERY.contains(&spec) {
        gallery::by_name(spec)?
    } else {
        return Err(Error::Config(format!(
            "'{spec}' is neither a readable file nor a gallery domain ({})",
            gallery::GALLERY.join(", ")
        )));
    };
    match z0 {
        Some([x, y]) => d.with_z0(C64::new(x, y)),
        None => Ok(d),
    }
}

fn rule_params(common: &Common, n: usize) -> RuleParams {
    let mut p = RuleParams::for_gram(n, common.prec());
    if let Some(o) = common.order {
        p.order = o;
    }
    if let Some(k) = common.panels {
        p.panels = k;
    }
    if let Some(g) = common.grading {
        p.grading_ratio = g;
    }
    p
}

fn config(common: &Common, domain: &DomainSpec, n: usize, extra: Value) -> Value {
    json!({
        "domain": domain.id_hash,
        "domain_name": domain.name,
        "z0": domain.z0,
        "n": n,
        "precision_bits": common.prec().bits(),
        "rule": rule_params(common, n),
        "extra": extra,
    })
}

fn ascending(ns: &[usize]) -> Result<()> {
    if ns.is_empty() || ns.windows(2).any(|w| w[0] >= w[1]) || ns[0] == 0 {
        return Err(Error::Invalid(
            "degree list must be positive and strictly ascending".into(),
        ));
    }
    Ok(())
}

pub fn run(ctx: &Context, cmd: &Command) -> Result<()> {
    match cmd {
        Command::Domains {
            domain,
            z0,
            samples,
        } => domains(ctx, domain.as_deref(), *z0, *samples),
        Command::Gram { common, degree } => {
            let d = resolve_domain(&common.domain, common.z0)?;
            with_precision!(common.prec(), T => gram_cmd::<T>(ctx, &d, common, *degree))
        }
        Command::Basis {
            common,
            degree,
            method,
        } => {
            let d = resolve_domain(&common.domain, common.z0)?;
            with_precision!(common.prec(), T => basis_cmd::<T>(ctx, &d, common, *degree, (*method).into()))
        }
        Command::Bieberbach {
            common,
            n,
            eval,
            route,
        } => {
            let d = resolve_domain(&common.domain, common.z0)?;
            with_precision!(common.prec(), T => bieberbach_cmd::<T>(ctx, &d, common, *n, eval, (*route).into()))
        }
        Command::ErrorCurve {
            common,
            samples,
            ns,
        } => {
            let d = resolve_domain(&common.domain, common.z0)?;
            with_precision!(common.prec(), T => error_curve_cmd::<T>(ctx, &d, common, samples, ns))
        }
        Command::RateFit {
            common,
            samples,
            ns,
            holdout,
        } => {
            let d = resolve_domain(&common.domain, common.z0)?;
            with_precision!(common.prec(), T => rate_fit_cmd::<T>(ctx, &d, common, samples, ns, holdout))
        }
        Command::CuspFit {
            domain,
            z0,
            cusp,
            p,
            t,
        } => {
            let d = resolve_domain(domain, *z0)?;
            cusp_fit_cmd(ctx, &d, *cusp, p, t)
        }
        Command::Diverge { common, x0, ns } => {
            let d = resolve_domain(&common.domain, common.z0)?;
            let mut common = common.clone();
            common.precision.get_or_insert(Precision::QuadDouble);
            with_precision!(common.prec(), T => diverge_cmd::<T>(ctx, &d, &common, *x0, ns))
        }
        Command::Keldysh {
            common,
            stages,
            budget,
            step,
            spike,
            thinning,
            max_thinning,
        } => {
            let d = resolve_domain(&common.domain, common.z0)?;
            let cfg = KeldyshConfig {
                stages: *stages,
                budget: *budget,
                step: *step,
                spike_param: *spike,
                thinning: *thinning,
                max_thinning: *max_thinning,
            };
            with_precision!(common.prec(), T => keldysh_cmd::<T>(ctx, &d, common, &cfg))
        }
        Command::Report { dir } => report(ctx, dir.as_deref().unwrap_or(&ctx.out)),
    }
}

fn domains(
    ctx: &Context,
    domain: Option<&str>,
    z0: Option<[f64; 2]>,
    samples: usize,
) -> Result<()> {
    let Some(spec) = domain else {
        let mut rows = Vec::new();
        for name in gallery::GALLERY {
            let d = gallery::by_name(name)?;
            println!("{name:<8} {}  z0 = {:?}", d.short_hash(), d.z0);
            rows.push(json!({"name": name, "hash": d.id_hash, "z0": d.z0, "center": d.center}));
        }
        let v = experiments::artifact("domains", &json!({"gallery": gallery::GALLERY}), &rows);
        return ctx.write_named(
            &format!("domains-gallery-{}.json", rows.len()),
            &to_bytes(&v),
        );
    };
    if samples < 3 {
        return Err(Error::Invalid("need at least 3 boundary samples".into()));
    }
    let d = resolve_domain(spec, z0)?;
    let mut csv = String::from("arc,t,re,im\n");
    for (i, t, z) in d.sample_with_index(samples) {
        csv.push_str(&format!("{i},{t},{},{}\n", z.re, z.im));
    }
    ctx.write("domains", &d, samples, "csv", csv.as_bytes())?;
    let result = json!({
        "spec": d.digest_value(),
        "hash": d.id_hash,
        "length": d.length(),
        "diameter": d.diameter(),
        "winding_at_z0": d.winding_number(d.z0())?,
    });
    ctx.write_json(
        "domains",
        &d,
        samples,
        &json!({"domain": d.id_hash, "samples": samples}),
        &result,
    )
}

fn gram_cmd<T: Real>(ctx: &Context, d: &DomainSpec, common: &Common, n: usize) -> Result<()> {
    let g = ctx.gram::<T>(d, n, &rule_params(common, n))?;
    let mut csv = Vec::new();
    g.write_csv(&mut csv)?;
    ctx.write("gram", d, n, "csv", &csv)?;
    let result = json!({
        "degree": n,
        "area": g.area().to_f64(),
        "center": [g.center.re, g.center.im],
        "rule_digest": g.rule_digest,
        "matrix_digest": bieberbach::digest::bytes_digest(&g.to_binary()),
    });
    ctx.write_json("gram", d, n, &config(common, d, n, Value::Null), &result)
}

/// Quadrature measure for the least-squares route.
fn area_measure<T: Real>(d: &DomainSpec, n: usize) -> Result<AreaMeasure<T>> {
    let order = (n + 8).max(24);
    if d.name == "lune"
        && gallery::lune(d.z0())
            .map(|g| g.arcs == d.arcs)
            .unwrap_or(false)
    {
        return Ok(AreaMeasure::lune_strip(order, order, 4 + n / 4));
    }
    AreaMeasure::fan(d, order, 4 + n / 4, order)
}

fn basis_cmd<T: Real>(
    ctx: &Context,
    d: &DomainSpec,
    common: &Common,
    n: usize,
    method: Method,
) -> Result<()> {
    let b: OrthoBasis<T> = match method {
        Method::Cholesky => ctx.basis(d, n, common)?,
        Method::Arnoldi => orthonormalize_arnoldi(d, &area_measure::<T>(d, n)?, n)?,
    };
    let mut csv = Vec::new();
    b.write_csv(&mut csv)?;
    ctx.write("basis", d, n, "csv", &csv)?;
    let leading: Vec<f64> = (0..=n)
        .map(|k| b.leading(k).map(|c| c.re.to_f64()))
        .collect::<Result<_>>()?;
    let result = json!({
        "degree": n,
        "method": method,
        "residual": b.residual,
        "condition_estimate": b.condition_estimate,
        "leading": leading,
    });
    println!("residual {:e}", b.residual);
    ctx.write_json(
        "basis",
        d,
        n,
        &config(common, d, n, json!({"method": method})),
        &result,
    )
}

fn bieberbach_cmd<T: Real>(
    ctx: &Context,
    d: &DomainSpec,
    common: &Common,
    n: usize,
    eval: &[[f64; 2]],
    route: BuildMethod,
) -> Result<()> {
    if n == 0 {
        return Err(Error::Invalid("n must be at least 1".into()));
    }
    let z0 = d.z0();
    let params = rule_params(common, n - 1);
    let (p, r0): (BieberbachPoly<T>, f64) = match route {
        BuildMethod::Formula => {
            let b = orthonormalize_cholesky(&ctx.gram::<T>(d, n - 1, &params)?)?;
            (
                bieberbach_from_basis(&b, n, z0)?,
                inner_radius_estimate(&b, n, z0)?.to_f64(),
            )
        }
        BuildMethod::Extremal => {
            let g = ctx.gram::<T>(d, n - 1, &params)?;
            let p = solve_extremal(&g, n, z0)?;
            let r0 = (T::one() / (T::pi() * p.s_n)).sqrt().to_f64();
            (p, r0)
        }
    };
    let mut csv = Vec::new();
    p.write_csv(&mut csv)?;
    ctx.write("bieberbach", d, n, "csv", &csv)?;
    let values: Vec<Value> = eval
        .iter()
        .map(|z| {
            let v = p.eval_c64(C64::new(z[0], z[1]));
            println!("B_{n}({}, {}) = {} {:+e}i", z[0], z[1], v.re, v.im);
            json!({"z": z, "value": [v.re, v.im]})
        })
        .collect();
    let (def0, def1) = p.normalization_defect();
    let result = json!({
        "n": n,
        "route": route,
        "s_n": p.s_n.to_f64(),
        "r0_estimate": r0,
        "normalization_defect": [def0, def1],
        "evaluations": values,
    });
    ctx.write_json(
        "bieberbach",
        d,
        n,
        &config(common, d, n, json!({"route": route, "eval": eval})),
        &result,
    )
}

fn curve<T: Real>(
    ctx: &Context,
    d: &DomainSpec,
    common: &Common,
    samples: &SampleArgs,
    ns: &[usize],
) -> Result<(Vec<(usize, f64)>, ReferenceMap, SampleSet)> {
    ascending(ns)?;
    let map = ReferenceMap::for_domain(d)?;
    let nmax = *ns.last().expect("nonempty");
    let b = ctx.basis::<T>(d, nmax - 1, common)?;
    let set = SampleSet::new(
        d,
        samples.boundary_samples,
        samples.interior_samples,
        samples.seed,
    );
    let c = sup_error_curve(&b, &map, ns, &set)?;
    Ok((c, map, set))
}

fn error_curve_cmd<T: Real>(
    ctx: &Context,
    d: &DomainSpec,
    common: &Common,
    samples: &SampleArgs,
    ns: &[usize],
) -> Result<()> {
    let (c, map, set) = curve::<T>(ctx, d, common, samples, ns)?;
    let nmax = c.last().map(|p| p.0).unwrap_or(0);
    let mut csv = Vec::new();
    experiments::write_curve_csv(&mut csv, "n,sup_error", &c)?;
    ctx.write("error-curve", d, nmax, "csv", &csv)?;
    let result = json!({"curve": c, "r0": map.r0, "samples": set});
    ctx.write_json(
        "error-curve",
        d,
        nmax,
        &config(common, d, nmax, json!({"N": ns, "samples": samples})),
        &result,
    )
}

fn rate_fit_cmd<T: Real>(
    ctx: &Context,
    d: &DomainSpec,
    common: &Common,
    samples: &SampleArgs,
    ns: &[usize],
    holdout: &[usize],
) -> Result<()> {
    let mut all: Vec<usize> = ns.iter().chain(holdout).copied().collect();
    all.sort_unstable();
    all.dedup();
    let (c, _, _) = curve::<T>(ctx, d, common, samples, &all)?;
    let fit_pts: Vec<(usize, f64)> = c.iter().filter(|p| ns.contains(&p.0)).copied().collect();
    let fit = fit_rate(&fit_pts)?;
    let held: Vec<Value> = c
        .iter()
        .filter(|p| holdout.contains(&p.0))
        .map(|(n, e)| json!({"n": n, "observed": e, "predicted": fit.predict(*n), "ratio": fit.predict(*n) / e}))
        .collect();
    println!(
        "C = {:.4e}, q = {:.6}, r = {:.2}, R^2 = {:.6}",
        fit.c, fit.q, fit.r, fit.r2
    );
    let nmax = c.last().map(|p| p.0).unwrap_or(0);
    let mut csv = Vec::new();
    experiments::write_curve_csv(&mut csv, "n,sup_error", &c)?;
    ctx.write("rate-fit", d, nmax, "csv", &csv)?;
    let cfg = config(
        common,
        d,
        nmax,
        json!({"N": ns, "holdout": holdout, "samples": samples}),
    );
    ctx.write_json(
        "rate-fit",
        d,
        nmax,
        &cfg,
        &json!({"fit": fit, "holdout": held, "curve": c}),
    )
}

fn cusp_fit_cmd(ctx: &Context, d: &DomainSpec, cusp: usize, ps: &[f64], t: &[f64]) -> Result<()> {
    let ts: Vec<f64> = if t.is_empty() {
        (0..=6).map(|j| 0.2 * 0.5f64.powi(j)).collect()
    } else {
        t.to_vec()
    };
    if ps.is_empty() || ps.iter().any(|p| !(*p > 1.0)) {
        return Err(Error::Invalid("cusp exponents must exceed 1".into()));
    }
    let map = ReferenceMap::for_domain(d)?;
    let cu = d.cusps.get(cusp).ok_or(Error::OutOfRange {
        index: cusp,
        max: d.cusps.len(),
    })?;
    let v = C64::new(cu.vertex[0], cu.vertex[1]);
    let pts = d.cusp_approach_points(cusp, &ts)?;
    let dist: Vec<f64> = pts.iter().map(|z| (z - v).norm()).collect();
    let logs: Vec<f64> = pts
        .iter()
        .map(|z| map.log_gap(*z, v))
        .collect::<Result<_>>()?;
    let fits = ps
        .iter()
        .map(|p| fit_cusp_values(&dist, &logs, *p))
        .collect::<Result<Vec<_>>>()?;
    let best = fits
        .iter()
        .max_by(|a, b| a.r2.total_cmp(&b.r2))
        .map(|f| f.p);
    for f in &fits {
        println!("p = {}: c = {:.6}, R^2 = {:.6}", f.p, f.c, f.r2);
    }
    let mut csv = String::from("t,dist,log_gap\n");
    for ((t, dd), l) in ts.iter().zip(&dist).zip(&logs) {
        csv.push_str(&format!("{t},{dd},{l}\n"));
    }
    ctx.write("cusp-fit", d, ts.len(), "csv", csv.as_bytes())?;
    let cfg = json!({"domain": d.id_hash, "z0": d.z0, "cusp": cusp, "p": ps, "t": ts});
    ctx.write_json(
        "cusp-fit",
        d,
        ts.len(),
        &cfg,
        &json!({"fits": fits, "best_p": best}),
    )
}

fn diverge_cmd<T: Real>(
    ctx: &Context,
    d: &DomainSpec,
    common: &Common,
    x0: f64,
    ns: &[usize],
) -> Result<()> {
    ascending(ns)?;
    let nmax = *ns.last().expect("nonempty");
    let b = ctx.basis::<T>(d, nmax - 1, common)?;
    let r = divergence_probe(d, &b, x0, ns)?;
    for (nn, s) in &r.sup_table {
        println!("N = {nn:>4}: sup |B_n(x0)| = {s:.6e}");
    }
    println!("growth {:.4e} ({})", r.growth, r.verdict);
    let mut csv = Vec::new();
    experiments::write_curve_csv(&mut csv, "n,abs_b_n_x0", &r.values)?;
    ctx.write("diverge", d, nmax, "csv", &csv)?;
    ctx.write_json(
        "diverge",
        d,
        nmax,
        &config(common, d, nmax, json!({"x0": x0, "N": ns})),
        &r,
    )
}

fn keldysh_cmd<T: Real>(
    ctx: &Context,
    d: &DomainSpec,
    common: &Common,
    cfg: &KeldyshConfig,
) -> Result<()> {
    let stages = keldysh_iterate::<T>(d, cfg)?;
    let mut csv = String::from("stage,xi,xi_next,n,value,verified,spike_param,stability\n");
    for s in &stages {
        let ok = s.certificate.verify();
        println!(
            "stage {}: n = {}, |B_n(xi_next)| = {:.6}, verified {ok}",
            s.stage, s.n, s.certificate.value
        );
        csv.push_str(&format!(
            "{},{},{},{},{},{ok},{},{}\n",
            s.stage, s.xi, s.xi_next, s.n, s.certificate.value, s.spike_param, s.stability
        ));
    }
    ctx.write("keldysh", d, cfg.budget, "csv", csv.as_bytes())?;
    let verified: Vec<bool> = stages.iter().map(|s| s.certificate.verify()).collect();
    ctx.write_json(
        "keldysh",
        d,
        cfg.budget,
        &config(common, d, cfg.budget, json!(cfg)),
        &json!({"stages": stages, "verified": verified}),
    )
}

fn report(ctx: &Context, dir: &Path) -> Result<()> {
    let mut names: Vec<String> = fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".json") && !n.starts_with("report-"))
        .collect();
    names.sort();
    let mut rows = Vec::new();
    let mut csv = String::from("file,command,version,config_digest\n");
    for name in &names {
        let text = fs::read_to_string(dir.join(name))?;
        let Ok(v) = serde_json::from_str::<Value>(&text) else {
            log::warn!("skipping {name}: not JSON");
            continue;
        };
        let field = |k: &str| v.get(k).and_then(Value::as_str).unwrap_or("").to_string();
        if field("tool") != "bieberbach" {
            continue;
        }
        let (cmd, ver, dig) = (field("command"), field("version"), field("config_digest"));
        println!("{name:<48} {cmd:<12} {}", &dig[..12.min(dig.len())]);
        csv.push_str(&format!("{name},{cmd},{ver},{dig}\n"));
        rows.push(json!({"file": name, "command": cmd, "version": ver, "config_digest": dig, "result": v.get("result")}));
    }
    let tag = &json_digest(&rows)[..12];
    ctx.write_named(&format!("report-{tag}-{}.csv", rows.len()), csv.as_bytes())?;
    let v = experiments::artifact("report", &json!({"files": names}), &rows);
    ctx.write_named(&format!("report-{tag}-{}.json", rows.len()), &to_bytes(&v))
}
