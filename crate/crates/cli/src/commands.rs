//! One function per subcommand, each producing a table and a JSON document.

use serde_json::{json, Value};
use singmetric_core::eigensolver::{
    default_radial_mesh, default_schrodinger_mesh, extrapolated_spectrum, ExtrapolatedSpectrum,
    Route, STURM_TOL,
};
use singmetric_core::geometry::{geodesic_field, Stencil};
use singmetric_core::geometry::{collar_volume, minkowski_fit};
use singmetric_core::hardy::{
    davies_mandouvalos_product, estimate_riemannian_hardy_constant, hardy_constant_formula,
    hardy_meshes,
};
use singmetric_core::mesh::End;
use singmetric_core::perturbation::{
    bound_constants, boundary_decay_check, default_sweep_mesh, discrete_norm_inequality_check,
    eps_grid, hardy_operator_pair, lowner_heinz_pair, norm_chain_pencil, rate_fit,
    truncated_sweep,
};
use singmetric_core::reduction::{potential_closed, potential_derivative_form, RadialProblem};
use singmetric_core::{Mesh, ModelParams};

use crate::config::{RouteChoice, RunConfig};
use crate::report::{Cell, Table};
use crate::CliError;

/// Tolerance on fitted rate exponents.
pub const RATE_TOL: f64 = 0.05;

pub struct Report {
    pub table: Table,
    pub json: Value,
}

fn params(cfg: &RunConfig) -> Result<ModelParams, CliError> {
    Ok(ModelParams::new(
        cfg.dim.unwrap_or(2),
        cfg.gamma.unwrap_or(0.0),
        cfg.mode.unwrap_or(0),
        cfg.shift.unwrap_or(0.0),
    )?)
}

fn base_provenance(command: &str, p: &ModelParams) -> Vec<(String, String)> {
    vec![
        ("singmetric".into(), env!("CARGO_PKG_VERSION").into()),
        ("command".into(), command.into()),
        ("gamma".into(), p.gamma().to_string()),
        ("dim".into(), p.dim().to_string()),
        ("n".into(), p.mode().to_string()),
    ]
}

fn elements(cfg: &RunConfig, default_nodes: usize) -> Result<usize, CliError> {
    let nodes = cfg.mesh_nodes.unwrap_or(default_nodes);
    if nodes < 3 {
        return Err(CliError::Validation(format!("--mesh-nodes must be at least 3, got {nodes}")));
    }
    Ok(nodes - 1)
}

fn grid(cfg: &RunConfig, lo: f64, hi: f64, count: usize) -> Result<Vec<f64>, CliError> {
    let (lo, hi, count) = cfg.eps_range(lo, hi, count);
    Ok(eps_grid(lo, hi, count)?)
}

fn route_spectrum(p: &ModelParams, route: Route, el: usize, k: usize) -> Result<ExtrapolatedSpectrum, CliError> {
    let mesh = match route {
        Route::Schrodinger => {
            default_schrodinger_mesh(&RadialProblem::new(p.gamma(), p.mode())?, el)?
        }
        _ => default_radial_mesh(1.0, el)?,
    };
    Ok(extrapolated_spectrum(p, route, &mesh, k)?)
}

pub fn spectrum(cfg: &RunConfig) -> Result<Report, CliError> {
    let p = params(cfg)?;
    let k = cfg.k.unwrap_or(3);
    let el = elements(cfg, 4097)?;
    let routes = match cfg.route.unwrap_or(RouteChoice::Radial) {
        RouteChoice::Radial => vec![Route::Radial],
        RouteChoice::Schrodinger => vec![Route::Schrodinger],
        RouteChoice::Both => vec![Route::Radial, Route::Schrodinger],
    };
    let spectra = routes
        .iter()
        .map(|&r| route_spectrum(&p, r, el, k))
        .collect::<Result<Vec<_>, _>>()?;
    let both = spectra.len() == 2;
    let rel: Vec<f64> = if both {
        spectra[0]
            .values()
            .iter()
            .zip(spectra[1].values())
            .map(|(a, b)| (a - b).abs() / a.abs().max(b.abs()))
            .collect()
    } else {
        Vec::new()
    };
    let max_rel = rel.iter().copied().fold(0.0, f64::max);
    let mut header = vec!["route", "gamma", "n", "k", "eigenvalue", "mesh_nodes"];
    if both {
        header.push("max_rel_diff");
    }
    let mut table = Table::new(&header);
    table.provenance = base_provenance("spectrum", &p);
    table.provenance.push(("tolerance".into(), STURM_TOL.to_string()));
    table.provenance.push(("extrapolation".into(), "richardson-h2".into()));
    for s in &spectra {
        for (j, v) in s.values().iter().enumerate() {
            let mut row: Vec<Cell> = vec![
                s.route.name().into(),
                p.gamma().into(),
                p.mode().into(),
                (j + 1).into(),
                (*v).into(),
                s.mesh_nodes.into(),
            ];
            if both {
                row.push(max_rel.into());
            }
            table.push(row);
        }
    }
    let json = json!({
        "gamma": p.gamma(),
        "dim": p.dim(),
        "n": p.mode(),
        "tolerance": STURM_TOL,
        "routes": spectra.iter().map(|s| json!({
            "route": s.route.name(),
            "mesh_nodes": s.mesh_nodes,
            "eigenvalues": s.values(),
            "coarse": s.coarse,
            "fine": s.fine,
            "error_estimates": s.extrapolated.iter().map(|e| e.error_estimate).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "relative_differences": rel,
        "max_rel_diff": if both { Some(max_rel) } else { None },
    });
    Ok(Report { table, json })
}

fn sweep_mesh(cfg: &RunConfig) -> Result<Mesh, CliError> {
    Ok(match cfg.mesh_nodes {
        None => default_sweep_mesh()?,
        Some(_) => default_radial_mesh(1.0, elements(cfg, 4097)?)?,
    })
}

pub fn rate(cfg: &RunConfig) -> Result<Report, CliError> {
    let p = params(cfg)?;
    let k = cfg.k.unwrap_or(2);
    let eps = grid(cfg, 3e-4, 3e-2, 12)?;
    let sweep = truncated_sweep(&p, &eps, k, &sweep_mesh(cfg)?)?;
    let fits = (0..k).map(|j| rate_fit(&sweep, j)).collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&[
        "gamma", "n", "k", "eps", "lambda_full", "lambda_eps", "gap", "variational_bound",
        "closed_form_bound",
    ]);
    table.provenance = base_provenance("rate", &p);
    table.provenance.push(("mesh_nodes".into(), sweep.mesh.len().to_string()));
    table.provenance.push(("tolerance".into(), sweep.tolerance.to_string()));
    table.provenance.push(("noise_floor".into(), (100.0 * sweep.tolerance).to_string()));
    for j in 0..k {
        for (i, e) in sweep.eps_list.iter().enumerate() {
            table.push(vec![
                p.gamma().into(),
                p.mode().into(),
                (j + 1).into(),
                (*e).into(),
                sweep.lambda_full[j].into(),
                sweep.lambda_eps[i][j].into(),
                sweep.gaps[i][j].into(),
                sweep.variational_bounds[i][j].into(),
                sweep.closed_form_bounds[i][j].into(),
            ]);
        }
    }
    let json = Value::Array(
        fits.iter()
            .map(|f| {
                json!({
                    "gamma": p.gamma(),
                    "n": p.mode(),
                    "k": f.index + 1,
                    "exponent": f.fit.exponent,
                    "target": f.target,
                    "stderr": f.fit.stderr,
                    "r2": f.fit.r2,
                    "points_used": f.fit.points_used,
                    "excluded_eps": f.excluded,
                    "pass": f.within(RATE_TOL),
                })
            })
            .collect(),
    );
    Ok(Report { table, json })
}

pub fn hardy(cfg: &RunConfig) -> Result<Report, CliError> {
    let p = params(cfg)?;
    let levels = cfg.refine_levels()?;
    let meshes = hardy_meshes(levels.clone(), End::Hi)?;
    let est = estimate_riemannian_hardy_constant(&p, &meshes)?;
    let mut table = Table::new(&["mesh_nodes", "c_estimate", "target", "gap"]);
    table.provenance = base_provenance("hardy", &p);
    table.provenance.push(("refine".into(), format!("{}..{}", levels.start(), levels.end())));
    table.provenance.push(("extrapolated".into(), crate::report::format_float(est.extrapolated)));
    for (n, c) in est.mesh_sizes.iter().zip(&est.estimates_by_mesh) {
        table.push(vec![(*n).into(), (*c).into(), est.target.into(), (est.target - c).into()]);
    }
    let json = json!({
        "gamma": p.gamma(),
        "dim": p.dim(),
        "target": est.target,
        "c_estimate": est.c_est,
        "extrapolated": est.extrapolated,
        "relative_gap": est.relative_gap(),
        "monotone_from_below": est.monotone(1e-12),
        "mesh_nodes": est.mesh_sizes,
        "estimates": est.estimates_by_mesh,
        "minkowski_product": davies_mandouvalos_product(est.extrapolated, &p),
        "pass": est.relative_gap() <= 0.01,
    });
    Ok(Report { table, json })
}

pub fn minkowski(cfg: &RunConfig) -> Result<Report, CliError> {
    let p = params(cfg)?;
    let eps = grid(cfg, 1e-5, 1e-2, 12)?;
    let fit = minkowski_fit(&eps, &p)?;
    let target = p.dim() as f64 - p.mink_dim();
    let mut table = Table::new(&["eps", "collar_volume"]);
    table.provenance = base_provenance("minkowski", &p);
    table.provenance.push(("exponent".into(), crate::report::format_float(fit.exponent)));
    for &e in &eps {
        table.push(vec![e.into(), collar_volume(e, &p)?.into()]);
    }
    let c = hardy_constant_formula(&p);
    let json = json!({
        "gamma": p.gamma(),
        "dim": p.dim(),
        "exponent": fit.exponent,
        "target": target,
        "stderr": fit.stderr,
        "r2": fit.r2,
        "points_used": fit.points_used,
        "mink_dim": p.mink_dim(),
        "hardy_c": c,
        "minkowski_product": davies_mandouvalos_product(c, &p),
        "pass": (fit.exponent - target).abs() <= 1e-2,
    });
    Ok(Report { table, json })
}

pub fn geodesic(cfg: &RunConfig) -> Result<Report, CliError> {
    let gamma = cfg.gamma.unwrap_or(0.0);
    let p = ModelParams::new(2, gamma, 0, 0.0)?;
    let size = cfg.mesh_nodes.unwrap_or(512);
    let stencil = Stencil::from_count(cfg.stencil.unwrap_or(16))?;
    let field = geodesic_field(size, gamma, stencil)?;
    let mut table = Table::new(&["x", "y", "sigma", "d_exact", "d_graph"]);
    table.provenance = base_provenance("geodesic", &p);
    table.provenance.push(("grid".into(), size.to_string()));
    table.provenance.push(("stencil".into(), stencil.count().to_string()));
    for n in &field.nodes {
        table.push(vec![n.x.into(), n.y.into(), n.sigma.into(), n.d_exact.into(), n.d_graph.into()]);
    }
    let err = field.relative_sup_error();
    let json = json!({
        "gamma": gamma,
        "grid": size,
        "stencil": stencil.count(),
        "nodes": field.nodes.len(),
        "relative_sup_error": err,
        "min_margin": field.min_margin(),
        "center_value": field.center_value(),
        "center_exact": p.t_max(),
        "pass": err <= 0.02,
    });
    Ok(Report { table, json })
}

pub fn decay(cfg: &RunConfig) -> Result<Report, CliError> {
    let p = params(cfg)?;
    let index = cfg.k.unwrap_or(1);
    if index == 0 {
        return Err(CliError::Validation("--k is a 1-based eigenvalue index".into()));
    }
    let eps = grid(cfg, 3e-4, 3e-2, 12)?;
    let mesh = sweep_mesh(cfg)?;
    let pencil = singmetric_core::eigensolver::assemble_radial(&p, &mesh)?;
    let full = singmetric_core::eigensolver::eigenvalues_sturm(&pencil, index, STURM_TOL, true)?;
    let constants = bound_constants(cfg.c.unwrap_or(p.hardy_c()), p.shift())?;
    let rep = boundary_decay_check(&full, index - 1, &eps, &constants)?;
    let mut table = Table::new(&["eps", "mass", "mass_bound", "energy", "energy_bound"]);
    table.provenance = base_provenance("decay", &p);
    table.provenance.push(("k".into(), index.to_string()));
    table.provenance.push(("lambda".into(), crate::report::format_float(rep.lambda)));
    table.provenance.push(("mesh_nodes".into(), mesh.len().to_string()));
    for r in &rep.rows {
        table.push(vec![
            r.eps.into(),
            r.mass.into(),
            r.mass_bound.into(),
            r.energy.into(),
            r.energy_bound.into(),
        ]);
    }
    let json = json!({
        "gamma": p.gamma(),
        "n": p.mode(),
        "k": index,
        "lambda": rep.lambda,
        "c": constants.c,
        "mass_exponent": rep.mass_fit.exponent,
        "mass_target": rep.mass_target,
        "energy_exponent": rep.energy_fit.exponent,
        "energy_target": rep.energy_target,
        "bounds_hold": rep.bounds_hold(),
        "rows": rep.rows,
    });
    Ok(Report { table, json })
}

pub fn potential(cfg: &RunConfig) -> Result<Report, CliError> {
    let p = params(cfg)?;
    let problem = RadialProblem::new(p.gamma(), p.mode())?;
    let points = cfg.mesh_nodes.unwrap_or(201);
    if points < 2 {
        return Err(CliError::Validation("potential needs at least 2 sample points".into()));
    }
    let alpha = problem.t_max();
    let mut table = Table::new(&["t", "V_closed", "V_derivative_form", "abs_diff"]);
    table.provenance = base_provenance("potential", &p);
    table.provenance.push(("t_max".into(), alpha.to_string()));
    let mut max_diff = 0.0f64;
    let mut max_rel = 0.0f64;
    for i in 0..points {
        let t = alpha * (i as f64 + 0.5) / points as f64;
        let a = potential_closed(t, &problem)?;
        let b = potential_derivative_form(t, &problem)?;
        let d = (a - b).abs();
        max_diff = max_diff.max(d);
        max_rel = max_rel.max(d / a.abs().max(1.0));
        table.push(vec![t.into(), a.into(), b.into(), d.into()]);
    }
    let json = json!({
        "gamma": p.gamma(),
        "n": p.mode(),
        "points": points,
        "t_max": alpha,
        "max_abs_diff": max_diff,
        "max_rel_diff": max_rel,
    });
    Ok(Report { table, json })
}

pub fn bounds(cfg: &RunConfig) -> Result<Report, CliError> {
    let p = params(cfg)?;
    let c = cfg.c.unwrap_or(p.hardy_c());
    let constants = bound_constants(c, p.shift())?;
    let eps = cfg.eps.unwrap_or(1e-3);
    let seed = cfg.seed.unwrap_or(0);
    let samples = cfg.samples.unwrap_or(200);
    let pencil = norm_chain_pencil(&p, elements(cfg, 301)?)?;
    let chain = discrete_norm_inequality_check(&pencil, &constants, eps, samples, 50, seed)?;
    let (a, b) = hardy_operator_pair(&pencil, &constants, eps)?;
    let lh = lowner_heinz_pair(&a, &b, &[0.25, 0.5, 0.75]);
    let mut table = Table::new(&["quantity", "value"]);
    table.provenance = base_provenance("bounds", &p);
    table.provenance.push(("eps".into(), eps.to_string()));
    table.provenance.push(("seed".into(), seed.to_string()));
    table.provenance.push(("samples".into(), samples.to_string()));
    table.provenance.push(("mesh_nodes".into(), pencil.mesh.len().to_string()));
    let mut rows: Vec<(&str, f64)> = vec![
        ("c", constants.c),
        ("a", constants.a),
        ("c1", constants.c1),
        ("c_prime", constants.c_prime),
        ("decay_exp", constants.decay_exp),
        ("rate_exp", constants.rate_exp),
        ("shift_used", chain.shift),
        ("premise_hardy", chain.premise_hardy),
        ("premise_interpolated", chain.premise_interpolated),
        ("violations", chain.violations as f64),
        ("min_relative_margin", chain.min_relative_margin),
        ("lowner_heinz_premise", lh.premise_margin),
    ];
    let names = ["lowner_heinz_s0.25", "lowner_heinz_s0.5", "lowner_heinz_s0.75"];
    for (name, m) in names.iter().zip(&lh.margins) {
        rows.push((name, m.1));
    }
    for (q, v) in rows {
        table.push(vec![q.into(), v.into()]);
    }
    let json = json!({
        "gamma": p.gamma(),
        "dim": p.dim(),
        "n": p.mode(),
        "constants": constants,
        "norm_chain": chain,
        "norm_chain_passed": chain.passed(),
        "lowner_heinz": lh,
    });
    Ok(Report { table, json })
}
