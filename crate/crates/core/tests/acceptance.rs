//! End-to-end acceptance checks, one line per criterion.

use std::cell::OnceCell;
use std::time::{Duration, Instant};

use singmetric_core::eigensolver::{default_spectrum, Route};
use singmetric_core::fit::log_space;
use singmetric_core::geometry::{geodesic_field, minkowski_fit, Stencil};
use singmetric_core::hardy::{
    davies_mandouvalos_product, estimate_riemannian_hardy_constant, hardy_constant_formula,
    hardy_meshes, hardy_range_check, HardyEstimate,
};
use singmetric_core::mesh::End;
use singmetric_core::perturbation::{
    bound_constants, boundary_decay_check, default_sweep_mesh, discrete_norm_inequality_check,
    eps_grid, norm_chain_pencil, rate_fit, truncated_sweep, SweepTable,
};
use singmetric_core::ModelParams;

/// `J_n(x)` by its power series; adequate for `x < 15`.
fn bessel_j(n: u32, x: f64) -> f64 {
    let h = 0.5 * x;
    let mut term = h.powi(n as i32) / (1..=n).map(f64::from).product::<f64>();
    let mut sum = term;
    for m in 1..80 {
        term *= -h * h / (m as f64 * (m + n) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// First `count` positive zeros of `J_n` by scanning and bisection.
fn bessel_zeros(n: u32, count: usize) -> Vec<f64> {
    let mut zeros = Vec::new();
    let mut a = 0.5;
    while zeros.len() < count {
        let b = a + 0.05;
        if bessel_j(n, a).signum() != bessel_j(n, b).signum() {
            let (mut lo, mut hi) = (a, b);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if bessel_j(n, lo).signum() == bessel_j(n, mid).signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            zeros.push(0.5 * (lo + hi));
        }
        a = b;
    }
    zeros
}

fn bessel_oracle() -> (bool, String) {
    let mut worst = 0.0f64;
    for n in 0..=2u32 {
        let params = ModelParams::disc(0.0, n as i64).unwrap();
        let computed = default_spectrum(&params, Route::Radial, 3).unwrap();
        for (v, j) in computed.values().iter().zip(bessel_zeros(n, 3)) {
            worst = worst.max((v - j * j).abs() / (j * j));
        }
    }
    (worst <= 1e-6, format!("max relative error {worst:.3e} (tol 1e-6)"))
}

fn dual_route() -> (bool, String) {
    let mut worst = 0.0f64;
    for gamma in [0.1, 0.25, 0.4] {
        for n in [0, 1] {
            let params = ModelParams::disc(gamma, n).unwrap();
            let radial = default_spectrum(&params, Route::Radial, 3).unwrap().values();
            let schr = default_spectrum(&params, Route::Schrodinger, 3).unwrap().values();
            for (a, b) in radial.iter().zip(&schr) {
                worst = worst.max((a - b).abs() / a);
            }
        }
    }
    (worst <= 1e-6, format!("max relative difference {worst:.3e} (tol 1e-6)"))
}

fn sweep(gamma: f64, n: i64) -> SweepTable {
    let params = ModelParams::disc(gamma, n).unwrap();
    let eps = eps_grid(3e-4, 3e-2, 12).unwrap();
    truncated_sweep(&params, &eps, 2, &default_sweep_mesh().unwrap()).unwrap()
}

fn sharp_rate() -> (bool, String) {
    let mut worst = 0.0f64;
    let mut slowest = Duration::ZERO;
    for gamma in [0.0, 0.1, 0.25, 0.4] {
        let start = Instant::now();
        for n in [0, 1] {
            let table = sweep(gamma, n);
            for k in 0..2 {
                let fit = rate_fit(&table, k).unwrap();
                worst = worst.max((fit.fit.exponent - 1.0 / (1.0 - gamma)).abs());
            }
        }
        slowest = slowest.max(start.elapsed());
    }
    (
        worst <= 0.05 && slowest < Duration::from_secs(120),
        format!("max |exponent - 1/(1-gamma)| {worst:.4} (tol 0.05), slowest gamma {slowest:.2?}"),
    )
}

fn hardy_estimates() -> Vec<(ModelParams, HardyEstimate)> {
    let meshes = hardy_meshes(7..=12, End::Hi).unwrap();
    [(2, 0.0), (2, 0.25), (2, 0.4), (3, 0.2)]
        .iter()
        .map(|&(dim, gamma)| {
            let p = ModelParams::new(dim, gamma, 0, 0.0).unwrap();
            let est = estimate_riemannian_hardy_constant(&p, &meshes).unwrap();
            (p, est)
        })
        .collect()
}

fn hardy_constant(estimates: &[(ModelParams, HardyEstimate)]) -> (bool, String) {
    let mut worst = 0.0f64;
    let mut monotone = true;
    for (p, est) in estimates {
        let target = hardy_constant_formula(p);
        worst = worst.max((est.extrapolated - target).abs() / target);
        monotone &= est.monotone(1e-12)
            && est.estimates_by_mesh.iter().all(|&c| c <= target * (1.0 + 1e-12));
    }
    (
        worst <= 0.01 && monotone,
        format!("max relative gap {worst:.3e} (tol 1e-2), monotone from below: {monotone}"),
    )
}

fn range_and_product(estimates: &[(ModelParams, HardyEstimate)]) -> (bool, String) {
    let grid: Vec<f64> = (0..50).map(|i| i as f64 * 0.01).collect();
    let mut ok = hardy_range_check(&grid, 2).unwrap().passed();
    let grid3: Vec<f64> = (0..34).map(|i| i as f64 * 0.0098).collect();
    ok &= hardy_range_check(&grid3, 3).unwrap().passed();
    let mut closed = 0.0f64;
    for dim in 2..=4usize {
        for i in 0..20 {
            let gamma = i as f64 / (20.0 * dim as f64);
            let p = ModelParams::new(dim, gamma, 0, 0.0).unwrap();
            let c = hardy_constant_formula(&p);
            ok &= c > 1.0 && c <= 2.0;
            closed = closed.max((davies_mandouvalos_product(c, &p) - 2.0).abs());
        }
    }
    let numeric = estimates
        .iter()
        .map(|(p, e)| (davies_mandouvalos_product(e.extrapolated, p) - 2.0).abs())
        .fold(0.0, f64::max);
    (
        ok && closed <= 1e-12 && numeric <= 0.05,
        format!("1 < c <= 2: {ok}, closed-form |c(2+a-N)-2| {closed:.1e}, numerical {numeric:.3e} (tol 0.05)"),
    )
}

fn minkowski() -> (bool, String) {
    let eps = log_space(1e-5, 1e-2, 12);
    let mut worst = 0.0f64;
    for gamma in [0.0, 0.25, 0.4] {
        let p = ModelParams::disc(gamma, 0).unwrap();
        let fit = minkowski_fit(&eps, &p).unwrap();
        worst = worst.max((fit.exponent - (2.0 - 1.0 / (1.0 - gamma))).abs());
    }
    (worst <= 1e-2, format!("max slope error {worst:.3e} (tol 1e-2)"))
}

fn geodesic() -> (bool, String) {
    let mut worst = 0.0f64;
    for gamma in [0.0, 0.25] {
        let field = geodesic_field(512, gamma, Stencil::Sixteen).unwrap();
        worst = worst.max(field.relative_sup_error());
    }
    (worst <= 0.02, format!("max sup error / t_max {worst:.4} (tol 0.02)"))
}

fn sandwich_and_decay() -> (bool, String) {
    let mut sandwich = true;
    let mut decay_ok = true;
    let mut worst_exp = 0.0f64;
    for gamma in [0.0, 0.25, 0.4] {
        for n in [0, 1] {
            let table = sweep(gamma, n);
            for (i, row) in table.lambda_eps.iter().enumerate() {
                for (j, &l) in row.iter().enumerate() {
                    sandwich &= l >= table.lambda_full[j] - table.tolerance
                        && l <= table.variational_bounds[i][j] * (1.0 + 1e-12);
                }
            }
            let full = table.full.as_ref().unwrap();
            let constants = bound_constants(table.params.hardy_c(), 0.0).unwrap();
            for k in 0..2 {
                let rep = boundary_decay_check(full, k, &table.eps_list, &constants).unwrap();
                decay_ok &= rep.bounds_hold();
                worst_exp = worst_exp.max((rep.mass_fit.exponent - rep.mass_target).abs());
            }
        }
    }
    (
        sandwich && decay_ok && worst_exp <= 0.1,
        format!(
            "sandwich: {sandwich}, decay bounds: {decay_ok}, max decay exponent error {worst_exp:.4} (tol 0.1)"
        ),
    )
}

fn norm_chain() -> (bool, String) {
    let mut ok = true;
    let mut violations = 0;
    let mut margin = f64::INFINITY;
    let mut premise = 0.0f64;
    for n in [0, 1] {
        let p = ModelParams::disc(0.25, n).unwrap();
        let pencil = norm_chain_pencil(&p, 300).unwrap();
        let k = bound_constants(p.hardy_c(), 0.0).unwrap();
        let rep = discrete_norm_inequality_check(&pencil, &k, 1e-3, 200, 50, 2024).unwrap();
        ok &= rep.passed() && rep.samples == 200;
        violations += rep.violations;
        margin = margin.min(rep.min_relative_margin);
        premise = premise.max(rep.premise_hardy);
    }
    (
        ok && violations == 0,
        format!("violations {violations}, premise ||w^c (H)^-1/2||/c = {premise:.4}, min margin {margin:.3}"),
    )
}

fn determinism() -> (bool, String) {
    let render = || {
        let table = sweep(0.25, 1);
        let p = ModelParams::disc(0.25, 1).unwrap();
        let pencil = norm_chain_pencil(&p, 200).unwrap();
        let k = bound_constants(p.hardy_c(), 0.0).unwrap();
        let chain = discrete_norm_inequality_check(&pencil, &k, 1e-3, 50, 50, 9).unwrap();
        let est = estimate_riemannian_hardy_constant(&p, &hardy_meshes(7..=10, End::Hi).unwrap()).unwrap();
        format!(
            "{}\n{}\n{}",
            serde_json::to_string(&table).unwrap(),
            serde_json::to_string(&chain).unwrap(),
            serde_json::to_string(&est).unwrap()
        )
    };
    let (a, b) = (render(), render());
    (a == b, format!("{} bytes compared, identical: {}", a.len(), a == b))
}

fn main() {
    let mut failures = 0;
    let mut report = |id: u32, name: &str, budget: Duration, check: &dyn Fn() -> (bool, String)| {
        let start = Instant::now();
        let (ok, detail) = check();
        let elapsed = start.elapsed();
        let ok = ok && elapsed <= budget;
        if !ok {
            failures += 1;
        }
        println!(
            "criterion {id:>2} {}: {name}: {detail}; {elapsed:.2?} (budget {budget:.0?})",
            if ok { "PASS" } else { "FAIL" }
        );
    };
    let secs = Duration::from_secs;
    report(1, "Bessel oracle", secs(10), &bessel_oracle);
    report(2, "dual-route equality", secs(30), &dual_route);
    report(3, "sharp truncation rate", secs(480), &sharp_rate);
    let estimates = OnceCell::new();
    report(4, "Hardy constant", secs(30), &|| hardy_constant(estimates.get_or_init(hardy_estimates)));
    report(5, "Hardy range and Minkowski product", secs(5), &|| {
        range_and_product(estimates.get_or_init(hardy_estimates))
    });
    report(6, "Minkowski exponent", secs(5), &minkowski);
    report(7, "geodesic cross-check", secs(60), &geodesic);
    report(8, "perturbation sandwich and decay bounds", secs(60), &sandwich_and_decay);
    report(9, "discrete operator-norm chain", secs(30), &norm_chain);
    report(10, "determinism", secs(120), &determinism);
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
