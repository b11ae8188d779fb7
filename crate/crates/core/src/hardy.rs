//! Hardy constants: closed forms, and sharp constants estimated as the
//! largest generalized eigenvalue of a weighted quotient on nested meshes.
//!
//! The quotients concentrate at the singular end, so meshes reach element
//! sizes far below `1e-100`. Element matrices are computed on the element
//! rescaled to `[ρ, 1]` and the basis function at distance `s` from the
//! singular end is scaled by `s^{(1-β)/2}`; every entry is then `O(1)` and no
//! power of a tiny distance is ever formed.

use serde::{Deserialize, Serialize};

use crate::eigensolver::{eigenvalues_sturm, scatter, Boundary, Route, TridiagonalPencil, STURM_TOL};
use crate::error::{Error, Result};
use crate::geometry::ModelParams;
use crate::mesh::{End, Mesh};
use crate::quadrature::{distance_hat_moments, gauss12};

/// Grading ratio of the nested Hardy meshes.
pub const HARDY_RATIO: f64 = 0.85;

/// `2(1-γ) / (1 + (N-2)γ)`
pub fn hardy_constant_formula(params: &ModelParams) -> f64 {
    params.hardy_c()
}

/// Result of a range check over a grid of `γ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeReport {
    pub dim: usize,
    /// `(γ, c(γ))`
    pub values: Vec<(f64, f64)>,
    pub violations: Vec<String>,
}

impl RangeReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `1 < c ≤ 2` on the grid and that `c` strictly decreases in `γ`.
pub fn hardy_range_check(gamma_grid: &[f64], dim: usize) -> Result<RangeReport> {
    let mut values = Vec::with_capacity(gamma_grid.len());
    for &g in gamma_grid {
        values.push((g, ModelParams::new(dim, g, 0, 0.0)?.hardy_c()));
    }
    let mut violations = Vec::new();
    for &(g, c) in &values {
        if !(c > 1.0 && c <= 2.0) {
            violations.push(format!("gamma={g}: c={c} outside (1, 2]"));
        }
    }
    let mut sorted = values.clone();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    for w in sorted.windows(2) {
        if w[1].0 > w[0].0 && w[1].1 >= w[0].1 {
            violations.push(format!(
                "gamma={}: c={} not below c={} at gamma={}",
                w[1].0, w[1].1, w[0].1, w[0].0
            ));
        }
    }
    Ok(RangeReport {
        dim,
        values,
        violations,
    })
}

/// Sharp-constant estimates over a refinement sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardyEstimate {
    /// Estimate on the finest mesh.
    pub c_est: f64,
    pub mesh_sizes: Vec<usize>,
    pub estimates_by_mesh: Vec<f64>,
    /// Two-grid extrapolation from the finest pair.
    pub extrapolated: f64,
    /// Closed-form constant the estimates approach.
    pub target: f64,
}

impl HardyEstimate {
    /// True when each estimate is at least its predecessor, less `slack`.
    pub fn monotone(&self, slack: f64) -> bool {
        self.estimates_by_mesh.windows(2).all(|w| w[1] >= w[0] - slack)
    }

    pub fn relative_gap(&self) -> f64 {
        (self.extrapolated - self.target).abs() / self.target
    }
}

/// Nested geometric meshes on `[0, 1]` with `2^level` nodes for each level,
/// graded toward `toward`.
pub fn hardy_meshes(levels: std::ops::RangeInclusive<u32>, toward: End) -> Result<Vec<Mesh>> {
    if levels.is_empty() {
        return Err(Error::Input("empty refinement range".into()));
    }
    if *levels.end() > 12 {
        return Err(Error::Parameter(format!(
            "2^{} nodes with ratio {HARDY_RATIO} underflows the smallest element",
            levels.end()
        )));
    }
    levels
        .map(|l| Mesh::geometric_sequence(0.0, 1.0, 1usize << l, HARDY_RATIO, toward))
        .collect()
}

/// `∫ u^p ω(b u) φ_i φ_j du` over `[ρ, 1]` for the hats of that interval,
/// ordered `[ρρ, ρ1, 11]`, together with `∫ u^q ω(b u) du`.
fn unit_moments(p: f64, q: f64, rho: f64, b: f64, omega: Option<&dyn Fn(f64) -> f64>) -> ([f64; 3], f64) {
    let Some(omega) = omega else {
        let stiff = -((q + 1.0) * rho.ln()).exp_m1() / (q + 1.0);
        return (distance_hat_moments(rho, 1.0, p), stiff);
    };
    let rule = gauss12();
    let len = 1.0 - rho;
    let mut m = [0.0; 3];
    let mut stiff = 0.0;
    // split so each piece has a ratio of at least one half
    let mut lo = rho;
    while lo < 1.0 {
        let hi = (2.0 * lo).min(1.0);
        for (u, w) in rule.points(lo, hi) {
            let om = omega(b * u);
            let (fa, fb) = ((1.0 - u) / len, (u - rho) / len);
            let wp = w * u.powf(p) * om;
            m[0] += wp * fa * fa;
            m[1] += wp * fa * fb;
            m[2] += wp * fb * fb;
            stiff += w * u.powf(q) * om;
        }
        lo = hi;
    }
    (m, stiff)
}

/// `∫₀¹ u^q ω(b u) du` through `v = u^{q+1}`.
fn origin_moment(q: f64, b: f64, omega: Option<&dyn Fn(f64) -> f64>) -> f64 {
    match omega {
        None => 1.0 / (q + 1.0),
        Some(omega) => {
            let e = 1.0 / (q + 1.0);
            e * gauss12().integrate(0.0, 1.0, |v| omega(b * v.powf(e)))
        }
    }
}

/// Pencil of the quotient `∫ f'² s^β ω` (stiffness) against
/// `scale · ∫ f² s^{β-2} ω` (mass), over nodes at distances `s` from the
/// singular end, `s[0] = 0` with a Dirichlet condition there.
fn scaled_pencil(
    s: &[f64],
    beta: f64,
    omega: Option<&dyn Fn(f64) -> f64>,
    scale: f64,
    far: Boundary,
    mesh: &Mesh,
    gamma: f64,
) -> Result<TridiagonalPencil> {
    if s.len() < 3 || s[0] != 0.0 {
        return Err(Error::Input("Hardy mesh needs at least 3 nodes starting at the singular end".into()));
    }
    let x = 0.5 * (1.0 - beta);
    let elements: Vec<([f64; 3], [f64; 3])> = s
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            if a == 0.0 {
                let j = origin_moment(beta, b, omega);
                return ([f64::NAN, f64::NAN, j], [f64::NAN, f64::NAN, scale * j]);
            }
            let rho = a / b;
            let (m, k) = unit_moments(beta - 2.0, beta, rho, b, omega);
            let k = k / ((1.0 - rho) * (1.0 - rho));
            let (fa, fab) = (rho.powf(2.0 * x), rho.powf(x));
            (
                [k * fa, -k * fab, k],
                [scale * m[0] * fa, scale * m[1] * fab, scale * m[2]],
            )
        })
        .collect();
    let last = match far {
        Boundary::Dirichlet => s.len() - 2,
        Boundary::Natural => s.len() - 1,
    };
    let pencil = scatter(
        &elements,
        1,
        last,
        mesh,
        [Boundary::Dirichlet, far],
        Route::Hardy,
        gamma,
        0,
    );
    if pencil.stiff_diag.iter().chain(&pencil.mass_diag).any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite Hardy pencil entry".into()));
    }
    Ok(pencil)
}

/// Pencil of the model quotient with weights `t^{β-2}` (mass) and `t^β`
/// (stiffness) on a mesh of `[0, 1]`, Dirichlet at both ends. Unknowns are
/// scaled by `t^{(1-β)/2}`.
pub fn model_hardy_pencil(beta: f64, mesh: &Mesh) -> Result<TridiagonalPencil> {
    if !(beta < 1.0) {
        return Err(Error::Parameter(format!(
            "weight exponent beta = {beta} >= 1 admits no finite Hardy constant"
        )));
    }
    if beta <= -1.0 {
        return Err(Error::Parameter(format!(
            "weight exponent beta = {beta} <= -1 is outside the model"
        )));
    }
    if mesh.interval() != (0.0, 1.0) {
        return Err(Error::Domain("the model quotient lives on [0, 1]".into()));
    }
    scaled_pencil(mesh.offsets_from_lo(), beta, None, 1.0, Boundary::Dirichlet, mesh, 0.0)
}

/// Pencil of `∫ |f|²/d² dvol` against `Q(f)` for radial `f` on the unit
/// ball in `N` dimensions, on a mesh of `[0, 1]` in `r`. The condition at
/// `r = 0` is natural, at `r = 1` Dirichlet.
pub fn riemannian_hardy_pencil(params: &ModelParams, mesh: &Mesh) -> Result<TridiagonalPencil> {
    if mesh.interval() != (0.0, 1.0) {
        return Err(Error::Domain("the radial quotient lives on r in [0, 1]".into()));
    }
    let gamma = params.gamma();
    let beta = (2.0 - params.dim() as f64) * gamma;
    let power = params.dim() as i32 - 1;
    let omega = move |s: f64| (1.0 - s).powi(power);
    let sigma: Vec<f64> = mesh.offsets_from_hi().iter().rev().copied().collect();
    let mut pencil = scaled_pencil(
        &sigma,
        beta,
        Some(&omega),
        (1.0 - gamma) * (1.0 - gamma),
        Boundary::Natural,
        mesh,
        gamma,
    )?;
    let n = mesh.len();
    for d in pencil.dofs.iter_mut() {
        *d = n - 1 - *d;
    }
    pencil.boundary = [Boundary::Natural, Boundary::Dirichlet];
    Ok(pencil)
}

/// `sqrt` of the largest quotient value on the pencil's space.
pub fn sharp_constant(pencil: &TridiagonalPencil) -> Result<f64> {
    let mu = eigenvalues_sturm(pencil, 1, STURM_TOL * 1e-2, false)?.eigenvalues[0];
    if !(mu > 0.0) {
        return Err(Error::Numerical(format!("nonpositive lowest quotient eigenvalue {mu}")));
    }
    Ok(1.0 / mu.sqrt())
}

/// Ratio `fᵀ M f / fᵀ K f` of a Hardy pencil for a coefficient vector.
pub fn quotient(pencil: &TridiagonalPencil, f: &[f64]) -> f64 {
    let num = pencil.mass_inner(f, f);
    let den: f64 = f.iter().zip(pencil.apply_stiffness(f)).map(|(a, b)| a * b).sum();
    num / den
}

fn refinement_estimate(
    meshes: &[Mesh],
    target: f64,
    build: impl Fn(&Mesh) -> Result<TridiagonalPencil> + Sync,
) -> Result<HardyEstimate> {
    use rayon::prelude::*;
    if meshes.len() < 2 {
        return Err(Error::InsufficientData("Hardy extrapolation needs at least two meshes".into()));
    }
    let estimates = meshes
        .par_iter()
        .map(|m| sharp_constant(&build(m)?))
        .collect::<Result<Vec<f64>>>()?;
    let n = estimates.len();
    // the deficit in 1/c² behaves like (log of the smallest element)^{-2},
    // i.e. second order in the node count of a geometric mesh
    let (mu_c, mu_f) = (estimates[n - 2].powi(-2), estimates[n - 1].powi(-2));
    let (n_c, n_f) = (meshes[n - 2].len() as f64, meshes[n - 1].len() as f64);
    let q = (n_f / n_c).powi(2);
    let mu_ext = (q * mu_f - mu_c) / (q - 1.0);
    Ok(HardyEstimate {
        c_est: estimates[n - 1],
        mesh_sizes: meshes.iter().map(Mesh::len).collect(),
        estimates_by_mesh: estimates,
        extrapolated: 1.0 / mu_ext.sqrt(),
        target,
    })
}

/// Sharp constant of `∫ f² t^{β-2} ≤ c² ∫ f'² t^β` on `(0, 1)` over nested meshes.
pub fn estimate_model_hardy_constant(beta: f64, meshes: &[Mesh]) -> Result<HardyEstimate> {
    refinement_estimate(meshes, 2.0 / (1.0 - beta), |m| model_hardy_pencil(beta, m))
}

/// Sharp constant of `∫ |f|²/d² dvol ≤ c² Q(f)` for radial `f` over nested meshes in `r`.
pub fn estimate_riemannian_hardy_constant(params: &ModelParams, meshes: &[Mesh]) -> Result<HardyEstimate> {
    refinement_estimate(meshes, params.hardy_c(), |m| riemannian_hardy_pencil(params, m))
}

/// `c · (2 + mink_dim - N) ≥ 2 - tol`.
pub fn davies_mandouvalos_check(c_est: f64, params: &ModelParams, tol: f64) -> bool {
    c_est * (2.0 + params.mink_dim() - params.dim() as f64) >= 2.0 - tol
}

/// `c · (2 + mink_dim - N)`, equal to 2 for the closed-form constant.
pub fn davies_mandouvalos_product(c: f64, params: &ModelParams) -> f64 {
    c * (2.0 + params.mink_dim() - params.dim() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn formula_examples() {
        let c = |n, g| hardy_constant_formula(&ModelParams::new(n, g, 0, 0.0).unwrap());
        assert_eq!(c(2, 0.0), 2.0);
        assert!((c(2, 0.25) - 1.5).abs() < 1e-15);
        for n in 2..6 {
            let g = 1.0 / n as f64 - 1e-12;
            assert!((c(n, g) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn range_check_grids() {
        let g2: Vec<f64> = (0..50).map(|i| i as f64 * 0.01).collect();
        assert!(hardy_range_check(&g2, 2).unwrap().passed());
        let g3: Vec<f64> = (0..=6).map(|i| i as f64 * 0.05).chain([0.33]).collect();
        let r = hardy_range_check(&g3, 3).unwrap();
        assert!(r.passed(), "{:?}", r.violations);
        assert_eq!(r.values[0].1, 2.0);
        assert!(hardy_range_check(&[0.6], 2).is_err());
    }

    #[test]
    fn model_constant_rises_toward_two() {
        let meshes = hardy_meshes(7..=10, End::Lo).unwrap();
        let est = estimate_model_hardy_constant(0.0, &meshes).unwrap();
        assert!(est.monotone(0.0), "{est:?}");
        assert!(est.c_est < 2.0 + 1e-9);
        assert!(est.relative_gap() < 0.01, "{est:?}");
        assert!(model_hardy_pencil(1.0, &meshes[0]).is_err());
    }

    #[test]
    fn riemannian_over_model_is_one_minus_gamma() {
        let meshes = hardy_meshes(8..=8, End::Hi).unwrap();
        let model_mesh = hardy_meshes(8..=8, End::Lo).unwrap();
        let gamma = 0.25;
        let params = ModelParams::disc(gamma, 0).unwrap();
        let riem = sharp_constant(&riemannian_hardy_pencil(&params, &meshes[0]).unwrap()).unwrap();
        let model = sharp_constant(&model_hardy_pencil(0.0, &model_mesh[0]).unwrap()).unwrap();
        assert!((riem / model - (1.0 - gamma)).abs() < 1e-2, "{riem} {model}");
    }

    #[test]
    fn closed_form_product_is_two() {
        for (n, g) in [(2, 0.0), (2, 0.25), (2, 0.4), (3, 0.2), (4, 0.1)] {
            let p = ModelParams::new(n, g, 0, 0.0).unwrap();
            assert!((davies_mandouvalos_product(p.hardy_c(), &p) - 2.0).abs() < 1e-12);
            assert!(davies_mandouvalos_check(p.hardy_c(), &p, 1e-12));
            assert!(davies_mandouvalos_check(p.hardy_c() * 0.98, &p, 0.05));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn random_piecewise_linear_functions_obey_the_inequality(seed in 0u64..1000, gamma in 0.0f64..0.49) {
            let params = ModelParams::disc(gamma, 0).unwrap();
            let mesh = Mesh::geometric_sequence(0.0, 1.0, 200, HARDY_RATIO, End::Hi).unwrap();
            let pencil = riemannian_hardy_pencil(&params, &mesh).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f: Vec<f64> = (0..pencil.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let c = params.hardy_c();
            prop_assert!(quotient(&pencil, &f) <= c * c * (1.0 + 1e-12));
        }
    }
}
