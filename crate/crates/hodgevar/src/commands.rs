//! The five commands, each producing an [`Output`].

use rayon::prelude::*;
use serde_json::{json, Value};

use hodgevar_core::canonical::{canonical_deformation, closedness_residual, fixed_point_residual, in_deformation_space};
use hodgevar_core::cohomology::{ddbar_check, ExactModel};
use hodgevar_core::deformation::check_frame;
use hodgevar_core::metric::{MetricContext, Theory};
use hodgevar_core::period::{diagram_residual, holomorphy_residual, transversality_residual, PeriodMap};
use hodgevar_core::{Bidegree, Error, LieModel, C64};

use crate::config::{Backend, RunConfig};
use crate::io::Family;
use crate::report::{complex, fmt_num, fmt_point, num, point, Output, Table};
use crate::verify::{self, Session, Status};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum TheoryArg {
    Bc,
    Dolbeault,
    Derham,
    All,
}

impl TheoryArg {
    fn theories(self) -> Vec<Theory> {
        match self {
            TheoryArg::Bc => vec![Theory::BottChern],
            TheoryArg::Dolbeault => vec![Theory::Dolbeault],
            TheoryArg::Derham => vec![Theory::DeRham],
            TheoryArg::All => vec![Theory::BottChern, Theory::Dolbeault, Theory::DeRham],
        }
    }
}

fn theory_label(t: Theory) -> &'static str {
    match t {
        Theory::BottChern => "bc",
        Theory::Dolbeault => "dolbeault",
        Theory::DeRham => "derham",
    }
}

pub fn cohomology(model: &LieModel, theory: TheoryArg, cfg: &RunConfig) -> Output {
    let ctx = MetricContext::new(model, cfg.metric());
    let exact = (cfg.backend == Backend::Exact).then(|| ExactModel::new(model));
    let basis = model.basis();
    let mut rows: Vec<(Theory, Option<Bidegree>, usize, usize)> = Vec::new();
    for th in theory.theories() {
        match th {
            Theory::DeRham => {
                for k in 0..=2 * basis.n() {
                    let dim = match &exact {
                        Some(e) => e.derham_dim(k),
                        None => ctx.derham_block(k).dim(),
                    };
                    rows.push((th, None, k, dim));
                }
            }
            _ => {
                for b in basis.blocks() {
                    let dim = match (&exact, th) {
                        (Some(e), Theory::BottChern) => e.bc_dim(b),
                        (Some(e), _) => e.dolbeault_dim(b),
                        (None, Theory::BottChern) => ctx.bc_block(b).dim(),
                        (None, _) => ctx.dolbeault_block(b).dim(),
                    };
                    rows.push((th, Some(b), b.total(), dim));
                }
            }
        }
    }
    let mut table = Table::new(&["theory", "p", "q", "k", "dim"]);
    let mut entries = Vec::new();
    for (th, b, k, dim) in &rows {
        let (p, q) = b.map_or((String::from("-"), String::from("-")), |b| (b.p.to_string(), b.q.to_string()));
        table.push(vec![theory_label(*th).into(), p, q, k.to_string(), dim.to_string()]);
        entries.push(json!({
            "theory": theory_label(*th),
            "p": b.map(|b| b.p),
            "q": b.map(|b| b.q),
            "k": k,
            "dim": dim,
        }));
    }
    let mut warnings = Vec::new();
    for (b, gap) in ctx.ill_conditioned_blocks() {
        warnings.push(format!(
            "ill-conditioned Bott-Chern Laplacian on ({},{}): smallest nonzero eigenvalue {}",
            b.p,
            b.q,
            fmt_num(gap)
        ));
    }
    Output {
        json: json!({"model": model.name(), "backend": backend_label(cfg.backend), "groups": entries}),
        table,
        csv: None,
        warnings,
    }
}

fn backend_label(b: Backend) -> &'static str {
    match b {
        Backend::Float => "float",
        Backend::Exact => "exact",
    }
}

pub fn ddbar(model: &LieModel, cfg: &RunConfig) -> Output {
    let report = match cfg.backend {
        Backend::Exact => ExactModel::new(model).ddbar_check(),
        Backend::Float => ddbar_check(&MetricContext::new(model, cfg.metric())),
    };
    let mut table = Table::new(&["p", "q", "closed-exact", "ddbar-exact", "holds"]);
    let mut entries = Vec::new();
    for e in &report.entries {
        let b = e.bidegree;
        table.push(vec![
            b.p.to_string(),
            b.q.to_string(),
            e.closed_exact.to_string(),
            e.ddbar_exact.to_string(),
            e.holds().to_string(),
        ]);
        entries.push(json!({
            "p": b.p, "q": b.q,
            "closed_exact": e.closed_exact, "ddbar_exact": e.ddbar_exact, "holds": e.holds(),
        }));
    }
    Output {
        json: json!({
            "model": model.name(),
            "backend": backend_label(cfg.backend),
            "holds": report.holds(),
            "bidegrees": entries,
        }),
        table,
        csv: None,
        warnings: Vec::new(),
    }
}

pub fn deform(model: LieModel, family: Family, cfg: &RunConfig) -> Output {
    let session = Session::new(model, family, cfg.clone());
    let s = &session;
    let exact = (cfg.backend == Backend::Exact).then(|| ExactModel::new(&s.model));
    let tables: Vec<_> = s
        .samples
        .par_iter()
        .map(|x| verify::table_at(s, exact.as_ref(), &x.phi))
        .collect();
    let mut table = Table::new(&["t", "p", "q", "h_bc", "h_bc_phi", "v", "u", "identity"]);
    let mut points = Vec::new();
    let mut warnings = Vec::new();
    for (x, t) in s.samples.iter().zip(tables) {
        match t {
            Ok(t) => {
                let mut rows = Vec::new();
                for e in &t.entries {
                    let ok = e.h_bc == e.h_bc_phi + e.v + t.u_shifted(e.bidegree);
                    table.push(vec![
                        fmt_point(&x.t),
                        e.bidegree.p.to_string(),
                        e.bidegree.q.to_string(),
                        e.h_bc.to_string(),
                        e.h_bc_phi.to_string(),
                        e.v.to_string(),
                        e.u.to_string(),
                        ok.to_string(),
                    ]);
                    rows.push(json!({
                        "p": e.bidegree.p, "q": e.bidegree.q, "h_bc": e.h_bc,
                        "h_bc_phi": e.h_bc_phi, "v": e.v, "u": e.u, "identity": ok,
                    }));
                }
                points.push(json!({"t": point(&x.t), "status": "ok", "bidegrees": rows}));
            }
            Err(e) => points.push(json!({"t": point(&x.t), "status": error_label(&e), "message": e.to_string()})),
        }
    }
    for (t, why) in &s.dropped {
        warnings.push(format!("t = {}: {why}", fmt_point(t)));
    }

    let phi = &s.family.beltrami;
    let canonical: Vec<Value> = s
        .harmonic_forms()
        .par_iter()
        .map(|(b, f)| match canonical_deformation(&s.ctx, f, phi) {
            Ok(cd) => {
                let fixed = fixed_point_residual(&s.ctx, &cd, phi).unwrap_or(f64::NAN);
                let mut closed: f64 = 0.0;
                let mut members = 0;
                for x in &s.samples {
                    let c = closedness_residual(&s.model, &cd, phi, &x.t, cfg.tol).unwrap_or(f64::NAN);
                    closed = closed.max(c);
                    members += usize::from(in_deformation_space(c, &cd.sigma0));
                }
                json!({
                    "p": b.p, "q": b.q,
                    "convergence": cd.convergence().into_iter().map(num).collect::<Vec<_>>(),
                    "fixed_point_residual": num(fixed),
                    "max_closedness": num(closed),
                    "closed_points": members,
                })
            }
            Err(e) => json!({"p": b.p, "q": b.q, "error": e.to_string()}),
        })
        .collect();
    Output {
        json: json!({
            "model": s.model.name(),
            "family": s.family.name,
            "order": phi.order(),
            "backend": backend_label(cfg.backend),
            "points": points,
            "canonical": canonical,
        }),
        table,
        csv: None,
        warnings,
    }
}

fn error_label(e: &Error) -> &'static str {
    match e {
        Error::FrameDegenerate { .. } => "frame-degenerate",
        Error::NotIntegrableAt { .. } => "not-integrable",
        Error::RankDrop { .. } => "rank-drop",
        _ => "error",
    }
}

/// One row of the period report.
struct PeriodRow {
    t: Vec<C64>,
    p: usize,
    k: usize,
    status: &'static str,
    message: Option<String>,
    pluecker: Vec<C64>,
    affine: Vec<C64>,
    dims: (usize, usize),
    holomorphy: f64,
}

pub fn period(model: LieModel, family: Family, pairs: &[(usize, usize)], cfg: &RunConfig) -> Output {
    let ctx = MetricContext::new(&model, cfg.metric());
    let ddbar = ddbar_check(&ctx);
    let phi = &family.beltrami;
    let m = phi.vars();
    let zero = vec![C64::new(0.0, 0.0); m];
    let points = cfg.points(m);
    let mut warnings = Vec::new();
    if !ddbar.holds() {
        warnings.push(format!("warning: {}", verify::DDBAR_WARNING));
    }

    let mut rows: Vec<PeriodRow> = Vec::new();
    let mut maps_json = Vec::new();
    for &(p, k) in pairs {
        let map = match PeriodMap::new(&ctx, phi, p, k) {
            Ok(map) => map,
            Err(e) => {
                warnings.push(format!("(p, k) = ({p}, {k}): {e}"));
                continue;
            }
        };
        let ambient = ctx.derham_block(k).dim();
        let reference = map
            .point(&model, &ctx, phi, &zero)
            .ok()
            .and_then(|pt| pt.chart.dominant_index());
        let mut transversality: f64 = 0.0;
        let mut diagram: f64 = 0.0;
        for d in 0..m {
            transversality = transversality.max(transversality_residual(&ctx, &map, d).unwrap_or(f64::NAN));
            diagram = diagram.max(diagram_residual(&model, &ctx, &map, phi, d).unwrap_or(f64::NAN));
        }
        maps_json.push(json!({
            "p": p, "k": k, "f": map.len(), "b": ambient,
            "transversality": num(transversality), "diagram": num(diagram),
        }));
        let batch: Vec<PeriodRow> = points
            .par_iter()
            .map(|t| {
                let mut row = PeriodRow {
                    t: t.clone(),
                    p,
                    k,
                    status: "ok",
                    message: None,
                    pluecker: Vec::new(),
                    affine: Vec::new(),
                    dims: (map.len(), ambient),
                    holomorphy: f64::NAN,
                };
                let phi_t = phi.at(t);
                let pt = check_frame(&phi_t).and_then(|_| map.point(&model, &ctx, phi, t));
                match pt {
                    Ok(pt) => {
                        row.pluecker = pt.chart.pluecker().map_or(Vec::new(), |v| v.iter().copied().collect());
                        row.affine = reference
                            .and_then(|r| pt.chart.affine_pluecker(r))
                            .map_or(Vec::new(), |v| v.iter().copied().collect());
                        row.holomorphy = (0..m)
                            .map(|d| holomorphy_residual(&model, &ctx, &map, phi, t, d).unwrap_or(f64::NAN))
                            .fold(0.0, f64::max);
                    }
                    Err(e) => {
                        row.status = error_label(&e);
                        row.message = Some(e.to_string());
                    }
                }
                row
            })
            .collect();
        rows.extend(batch);
    }
    rows.sort_by(|a, b| {
        let key = |r: &PeriodRow| r.t.iter().flat_map(|z| [z.re, z.im]).collect::<Vec<f64>>();
        key(a)
            .partial_cmp(&key(b))
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.p.cmp(&b.p))
            .then(a.k.cmp(&b.k))
    });

    let residual_of = |p: usize, k: usize, key: &str| -> Value {
        maps_json
            .iter()
            .find(|m| m["p"] == json!(p) && m["k"] == json!(k))
            .map_or(Value::Null, |m| m[key].clone())
    };
    let mut table = Table::new(&["t", "p", "k", "f", "b", "status", "holomorphy", "transversality", "diagram"]);
    let mut csv = Table::new(&["t", "p", "k", "index", "re", "im"]);
    let mut json_rows = Vec::new();
    for r in &rows {
        let tr = residual_of(r.p, r.k, "transversality");
        let dg = residual_of(r.p, r.k, "diagram");
        table.push(vec![
            fmt_point(&r.t),
            r.p.to_string(),
            r.k.to_string(),
            r.dims.0.to_string(),
            r.dims.1.to_string(),
            r.status.into(),
            if r.status == "ok" { fmt_num(r.holomorphy) } else { "-".into() },
            tr.as_f64().map_or("-".into(), fmt_num),
            dg.as_f64().map_or("-".into(), fmt_num),
        ]);
        for (i, z) in r.affine.iter().enumerate() {
            csv.push(vec![
                fmt_point(&r.t),
                r.p.to_string(),
                r.k.to_string(),
                i.to_string(),
                fmt_num(z.re),
                fmt_num(z.im),
            ]);
        }
        let mut obj = json!({
            "t": point(&r.t),
            "p": r.p,
            "k": r.k,
            "status": r.status,
            "dims": {"f": r.dims.0, "b": r.dims.1},
            "pluecker": r.pluecker.iter().map(|z| complex(*z)).collect::<Vec<_>>(),
            "affine": r.affine.iter().map(|z| complex(*z)).collect::<Vec<_>>(),
            "residuals": {
                "holomorphy": if r.status == "ok" { num(r.holomorphy) } else { Value::Null },
                "transversality": tr,
                "diagram": dg,
            },
        });
        if let Some(msg) = &r.message {
            obj["message"] = json!(msg);
        }
        json_rows.push(obj);
    }
    Output {
        json: Value::Array(json_rows),
        table,
        csv: Some(csv),
        warnings,
    }
}

pub fn verify(model: LieModel, family: Family, checks: &[&str], cfg: &RunConfig) -> (Output, bool) {
    let session = Session::new(model, family, cfg.clone());
    let results = verify::run(&session, checks);
    let mut warnings = Vec::new();
    for r in &results {
        for n in r.notes.iter().filter(|n| n.starts_with("warning")) {
            warnings.push(format!("{}: {n}", r.name));
        }
    }
    let ok = results.iter().all(|r| r.status != Status::Fail);
    (
        Output {
            json: verify::report_json(&session, &results),
            table: verify::report_table(&results),
            csv: None,
            warnings,
        },
        ok,
    )
}
