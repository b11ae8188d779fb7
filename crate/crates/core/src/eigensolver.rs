//! Symmetric tridiagonal generalized eigenproblems `K v = λ M v` from
//! piecewise-linear finite elements, solved by Sturm-count bisection with
//! inverse iteration for eigenvectors.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ModelParams;
use crate::mesh::{Grading, Mesh};
use crate::quadrature::{distance_hat_moments, gauss12, gauss_hat_moments};
use crate::reduction::RadialProblem;

/// Default absolute bisection width.
pub const STURM_TOL: f64 = 1e-12;
/// Default number of elements for radial and Schrödinger meshes.
pub const DEFAULT_ELEMENTS: usize = 4096;
/// Default grading ratio.
pub const DEFAULT_RATIO: f64 = 0.9;
/// Default smallest element next to a singular endpoint.
pub const DEFAULT_MIN_ELEMENT: f64 = 1e-10;
/// Left end of the Schrödinger interval for `n = 0`.
pub const SCHRODINGER_T_LO: f64 = 1e-6;
/// Grading of Schrödinger meshes; `h ~ √t` at the origin needs a gentle ratio.
pub const SCHRODINGER_RATIO: f64 = 0.97;

/// Condition imposed at an endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Dirichlet,
    Natural,
}

/// Which discretization produced a pencil.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Radial,
    Schrodinger,
    /// Hardy quotient pencils.
    Hardy,
}

impl Route {
    pub fn name(&self) -> &'static str {
        match self {
            Route::Radial => "radial",
            Route::Schrodinger => "schrodinger",
            Route::Hardy => "hardy",
        }
    }
}

/// Stiffness and mass matrices, both symmetric tridiagonal, over the free
/// nodes `dofs` of `mesh`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalPencil {
    pub stiff_diag: Vec<f64>,
    pub stiff_off: Vec<f64>,
    pub mass_diag: Vec<f64>,
    pub mass_off: Vec<f64>,
    pub boundary: [Boundary; 2],
    pub mesh: Mesh,
    /// Mesh node index of each unknown.
    pub dofs: Vec<usize>,
    pub route: Route,
    pub gamma: f64,
    pub mode: i64,
}

impl TridiagonalPencil {
    pub fn dim(&self) -> usize {
        self.stiff_diag.len()
    }

    /// Number of eigenvalues strictly below `shift`, from the inertia of
    /// `K - shift·M` by an `LDLᵀ` sweep.
    pub fn sturm_count(&self, shift: f64) -> usize {
        let n = self.dim();
        let mut count = 0;
        let mut d = self.stiff_diag[0] - shift * self.mass_diag[0];
        for i in 0..n {
            if i > 0 {
                let off = self.stiff_off[i - 1] - shift * self.mass_off[i - 1];
                d = self.stiff_diag[i] - shift * self.mass_diag[i] - off * off / d;
            }
            if d == 0.0 {
                d = -f64::EPSILON * (self.stiff_diag[i].abs() + shift.abs() * self.mass_diag[i]);
                if d == 0.0 {
                    d = -f64::MIN_POSITIVE;
                }
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    pub fn apply_stiffness(&self, v: &[f64]) -> Vec<f64> {
        tri_apply(&self.stiff_diag, &self.stiff_off, v)
    }

    pub fn apply_mass(&self, v: &[f64]) -> Vec<f64> {
        tri_apply(&self.mass_diag, &self.mass_off, v)
    }

    /// `uᵀ M v`
    pub fn mass_inner(&self, u: &[f64], v: &[f64]) -> f64 {
        dot(u, &self.apply_mass(v))
    }

    /// Pencil restricted to the first `count` unknowns, which is the problem
    /// with a Dirichlet condition at the next node.
    pub fn leading(&self, count: usize) -> Result<Self> {
        if count == 0 || count > self.dim() {
            return Err(Error::Parameter(format!(
                "leading block of size {count} from a pencil of size {}",
                self.dim()
            )));
        }
        let mut out = self.clone();
        out.stiff_diag.truncate(count);
        out.mass_diag.truncate(count);
        out.stiff_off.truncate(count - 1);
        out.mass_off.truncate(count - 1);
        out.dofs.truncate(count);
        out.boundary[1] = Boundary::Dirichlet;
        Ok(out)
    }

    /// Nodal values on the whole mesh, zero at constrained nodes.
    pub fn expand(&self, v: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.mesh.len()];
        for (&node, &x) in self.dofs.iter().zip(v) {
            full[node] = x;
        }
        full
    }
}

fn tri_apply(diag: &[f64], off: &[f64], v: &[f64]) -> Vec<f64> {
    let n = diag.len();
    (0..n)
        .map(|i| {
            let mut acc = diag[i] * v[i];
            if i > 0 {
                acc += off[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                acc += off[i] * v[i + 1];
            }
            acc
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Where a spectrum came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub route: Route,
    pub gamma: f64,
    pub mode: i64,
    pub mesh: Mesh,
    pub boundary: [Boundary; 2],
    pub tolerance: f64,
}

/// Ascending eigenvalues with optional mass-orthonormal eigenvectors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// Coefficients over the free nodes, one vector per eigenvalue.
    pub eigenvectors: Option<Vec<Vec<f64>>>,
    /// `‖(K - λM)v‖ / ‖Mv‖` per eigenpair.
    pub residuals: Option<Vec<f64>>,
    /// `max |vᵢᵀ M vⱼ - δᵢⱼ|`.
    pub orthonormality_defect: Option<f64>,
    pub provenance: Provenance,
    /// Mesh node index of each coefficient.
    #[serde(skip)]
    pub dofs: Vec<usize>,
}

impl Spectrum {
    /// Eigenvector `j` as nodal values on the provenance mesh.
    pub fn nodal(&self, j: usize) -> Option<Vec<f64>> {
        let v = self.eigenvectors.as_ref()?.get(j)?;
        let mut full = vec![0.0; self.provenance.mesh.len()];
        for (&node, &x) in self.dofs.iter().zip(v) {
            full[node] = x;
        }
        Some(full)
    }
}

/// The `k` smallest eigenvalues of the pencil by bisection to absolute width `tol`.
pub fn eigenvalues_sturm(
    pencil: &TridiagonalPencil,
    k: usize,
    tol: f64,
    vectors: bool,
) -> Result<Spectrum> {
    let n = pencil.dim();
    if k == 0 || k > n {
        return Err(Error::Parameter(format!(
            "requested {k} eigenvalues of a pencil of dimension {n}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::Parameter(format!("bisection tolerance must be positive, got {tol}")));
    }
    let mut lo = 0.0;
    let mut step = 1.0;
    while pencil.sturm_count(lo) > 0 {
        lo = -step;
        step *= 2.0;
        if step > 1e300 {
            return Err(Error::Numerical("no lower bound for the spectrum".into()));
        }
    }
    let mut hi = 1.0;
    while pencil.sturm_count(hi) < k {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::Numerical(format!("could not bracket {k} eigenvalues")));
        }
    }
    let eigenvalues = (0..k)
        .into_par_iter()
        .map(|j| bisect(pencil, j, lo, hi, tol))
        .collect::<Result<Vec<f64>>>()?;
    let provenance = Provenance {
        route: pencil.route,
        gamma: pencil.gamma,
        mode: pencil.mode,
        mesh: pencil.mesh.clone(),
        boundary: pencil.boundary,
        tolerance: tol,
    };
    if !vectors {
        return Ok(Spectrum {
            eigenvalues,
            eigenvectors: None,
            residuals: None,
            orthonormality_defect: None,
            provenance,
            dofs: pencil.dofs.clone(),
        });
    }
    let mut vecs: Vec<Vec<f64>> = Vec::with_capacity(k);
    for &lambda in &eigenvalues {
        let mut v = inverse_iteration(pencil, lambda)?;
        for _ in 0..2 {
            for u in &vecs {
                let c = pencil.mass_inner(u, &v);
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= c * ui;
                }
            }
        }
        normalize(pencil, &mut v)?;
        vecs.push(v);
    }
    let residuals = eigenvalues
        .iter()
        .zip(&vecs)
        .map(|(&lambda, v)| residual(pencil, lambda, v))
        .collect();
    let mut defect: f64 = 0.0;
    for i in 0..k {
        for j in 0..=i {
            let target = if i == j { 1.0 } else { 0.0 };
            defect = defect.max((pencil.mass_inner(&vecs[i], &vecs[j]) - target).abs());
        }
    }
    Ok(Spectrum {
        eigenvalues,
        eigenvectors: Some(vecs),
        residuals: Some(residuals),
        orthonormality_defect: Some(defect),
        provenance,
        dofs: pencil.dofs.clone(),
    })
}

/// Smallest `λ` with `sturm_count(λ) > j`, located to width `tol`.
fn bisect(pencil: &TridiagonalPencil, j: usize, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    if pencil.sturm_count(a) > j || pencil.sturm_count(b) <= j {
        return Err(Error::Numerical(format!("bisection bracket lost eigenvalue {j}")));
    }
    while b - a > tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if pencil.sturm_count(m) > j {
            b = m;
        } else {
            a = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// `‖(K - λM)v‖ / ‖Mv‖`
pub fn residual(pencil: &TridiagonalPencil, lambda: f64, v: &[f64]) -> f64 {
    let kv = pencil.apply_stiffness(v);
    let mv = pencil.apply_mass(v);
    let r: f64 = kv
        .iter()
        .zip(&mv)
        .map(|(a, b)| (a - lambda * b).powi(2))
        .sum();
    r.sqrt() / dot(&mv, &mv).sqrt()
}

fn normalize(pencil: &TridiagonalPencil, v: &mut [f64]) -> Result<()> {
    let norm = pencil.mass_inner(v, v).sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::Numerical("eigenvector collapsed during inverse iteration".into()));
    }
    let peak = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let sign = v
        .iter()
        .find(|x| x.abs() > 1e-12 * peak)
        .map_or(1.0, |x| x.signum());
    for x in v.iter_mut() {
        *x *= sign / norm;
    }
    Ok(())
}

fn inverse_iteration(pencil: &TridiagonalPencil, lambda: f64) -> Result<Vec<f64>> {
    let n = pencil.dim();
    let sub: Vec<f64> = pencil
        .stiff_off
        .iter()
        .zip(&pencil.mass_off)
        .map(|(k, m)| k - lambda * m)
        .collect();
    let diag: Vec<f64> = pencil
        .stiff_diag
        .iter()
        .zip(&pencil.mass_diag)
        .map(|(k, m)| k - lambda * m)
        .collect();
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i % 7) as f64)).collect();
    normalize(pencil, &mut v)?;
    for _ in 0..4 {
        let rhs = pencil.apply_mass(&v);
        v = solve_tridiagonal(&sub, &diag, &sub, rhs);
        normalize(pencil, &mut v)?;
    }
    Ok(v)
}

/// Gaussian elimination with partial pivoting on a tridiagonal system.
pub fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], mut b: Vec<f64>) -> Vec<f64> {
    let n = diag.len();
    if n == 1 {
        return vec![b[0] / nonzero(diag[0], diag[0])];
    }
    let dl = sub.to_vec();
    let mut d = diag.to_vec();
    let mut du = sup.to_vec();
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    let scale = diag.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    for i in 0..n - 1 {
        if d[i].abs() >= dl[i].abs() {
            let piv = nonzero(d[i], scale);
            d[i] = piv;
            let fact = dl[i] / piv;
            d[i + 1] -= fact * du[i];
            b[i + 1] -= fact * b[i];
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            let temp = d[i + 1];
            d[i + 1] = du[i] - fact * temp;
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du2[i];
            }
            du[i] = temp;
            let tb = b[i];
            b[i] = b[i + 1];
            b[i + 1] = tb - fact * b[i + 1];
        }
    }
    d[n - 1] = nonzero(d[n - 1], scale);
    let mut x = vec![0.0; n];
    x[n - 1] = b[n - 1] / d[n - 1];
    x[n - 2] = (b[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
    for i in (0..n.saturating_sub(2)).rev() {
        x[i] = (b[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    }
    x
}

fn nonzero(p: f64, scale: f64) -> f64 {
    if p == 0.0 {
        f64::EPSILON * scale.abs().max(f64::MIN_POSITIVE)
    } else {
        p
    }
}

/// Two-grid extrapolation of an `O(h²)` quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    pub extrapolated: f64,
    pub error_estimate: f64,
}

/// `(4 λ_{h/2} - λ_h) / 3` with error estimate `|λ_{h/2} - λ_h| / 3`.
pub fn richardson(lambda_h: f64, lambda_h2: f64) -> Extrapolation {
    Extrapolation {
        extrapolated: (4.0 * lambda_h2 - lambda_h) / 3.0,
        error_estimate: (lambda_h2 - lambda_h).abs() / 3.0,
    }
}

/// Mesh on `[0, r_cut]` graded toward `r_cut` with the default sizes.
pub fn default_radial_mesh(r_cut: f64, elements: usize) -> Result<Mesh> {
    Mesh::graded(
        0.0,
        r_cut,
        elements,
        Grading::GeometricRight {
            ratio: DEFAULT_RATIO,
        },
        DEFAULT_MIN_ELEMENT,
    )
}

/// Mesh on `[t_lo, t_max]` graded toward both ends with the default sizes;
/// `t_lo` is positive for `n = 0` and zero otherwise.
pub fn default_schrodinger_mesh(problem: &RadialProblem, elements: usize) -> Result<Mesh> {
    let t_lo = if problem.mode() == 0 {
        SCHRODINGER_T_LO
    } else {
        0.0
    };
    Mesh::graded(
        t_lo,
        problem.t_max(),
        elements,
        Grading::DoubleGraded {
            ratio: SCHRODINGER_RATIO,
        },
        DEFAULT_MIN_ELEMENT,
    )
}

/// Pencil of the weighted radial form on a mesh of `[0, r_cut]`:
/// stiffness `∫ (g'² + n² g²/r²) r dr`, mass `∫ g² r (1-r)^{-2γ} dr`.
/// The condition at `r = 0` is natural for `n = 0` and Dirichlet otherwise;
/// `r_cut` is always Dirichlet.
pub fn assemble_radial(params: &ModelParams, mesh: &Mesh) -> Result<TridiagonalPencil> {
    let left = if params.mode() == 0 {
        Boundary::Natural
    } else {
        Boundary::Dirichlet
    };
    assemble_radial_with(params, mesh, left)
}

/// As [`assemble_radial`] with an explicit condition at `r = 0`.
pub fn assemble_radial_with(
    params: &ModelParams,
    mesh: &Mesh,
    left: Boundary,
) -> Result<TridiagonalPencil> {
    if params.dim() != 2 {
        return Err(Error::Parameter(format!(
            "the radial route is implemented for the disc (N = 2), got N = {}",
            params.dim()
        )));
    }
    if params.mode() != 0 && left == Boundary::Natural {
        return Err(Error::Configuration(format!(
            "mode n = {} has an infinite form unless g(0) = 0; a natural condition at r = 0 is not admissible",
            params.mode()
        )));
    }
    let (lo, hi) = mesh.interval();
    if lo != 0.0 || !(hi > 0.0 && hi <= 1.0) {
        return Err(Error::Domain(format!(
            "radial mesh must cover [0, r_cut] with 0 < r_cut <= 1, got [{lo}, {hi}]"
        )));
    }
    let gamma = params.gamma();
    let n2 = (params.abs_mode() * params.abs_mode()) as f64;
    let sigma_shift = 1.0 - hi;
    let elements: Vec<([f64; 3], [f64; 3])> = mesh
        .iter_elements()
        .map(|el| {
            let m = 0.5 * (el.a + el.b) / el.len;
            let mut k = [m, -m, m];
            if n2 > 0.0 {
                let c = distance_hat_moments(el.a, el.b, -1.0);
                k[1] += n2 * c[1];
                if el.a > 0.0 {
                    k[0] += n2 * c[0];
                }
                k[2] += n2 * c[2];
            }
            let (sa, sb) = (el.from_hi.0 + sigma_shift, el.from_hi.1 + sigma_shift);
            let mass = if sa >= 0.5 {
                gauss_hat_moments(|r| r * (1.0 - r).powf(-2.0 * gamma), el.a, el.b)
            } else {
                let p = -2.0 * gamma;
                let u = distance_hat_moments(sb, sa, p);
                let v = distance_hat_moments(sb, sa, p + 1.0);
                [u[2] - v[2], u[1] - v[1], u[0] - v[0]]
            };
            (k, mass)
        })
        .collect();
    let first_free = usize::from(left == Boundary::Dirichlet);
    let last_free = mesh.len() - 2;
    Ok(scatter(
        &elements,
        first_free,
        last_free,
        mesh,
        [left, Boundary::Dirichlet],
        Route::Radial,
        gamma,
        params.mode(),
    ))
}

/// Pencil of `∫ h'² + V h² dt` with identity mass on a mesh of
/// `[t_lo, t_max - trunc]`. The right end is Dirichlet. At `t_lo = 0`
/// (allowed for `n ≠ 0`) the left end is Dirichlet; for `n = 0` the left end
/// must be positive and carries the natural condition of the radial form,
/// which after the change of variables is the boundary term `½ ρ(t_lo) h(t_lo)²`.
pub fn assemble_schrodinger(problem: &RadialProblem, mesh: &Mesh) -> Result<TridiagonalPencil> {
    let (t_lo, t_hi) = mesh.interval();
    let t_max = problem.t_max();
    if t_lo < 0.0 || t_hi > t_max * (1.0 + 1e-15) {
        return Err(Error::Domain(format!(
            "Schrödinger mesh [{t_lo}, {t_hi}] exceeds [0, {t_max}]"
        )));
    }
    if problem.mode() == 0 && t_lo == 0.0 {
        return Err(Error::Configuration(
            "n = 0 puts V ~ -1/(4t²) at critical coupling; the mesh must start at t_lo > 0".into(),
        ));
    }
    let shift = (t_max - t_hi).max(0.0);
    let rule = gauss12();
    let elements: Vec<([f64; 3], [f64; 3])> = mesh
        .iter_elements()
        .map(|el| {
            let inv = 1.0 / el.len;
            let mut k = [inv, -inv, inv];
            let s_a = el.from_hi.0 + shift;
            let mut vm = [0.0; 3];
            for (xi, w) in rule.points(0.0, 1.0) {
                let t = el.a + xi * el.len;
                let s = s_a - xi * el.len;
                let v = problem.potential_at(t, s) * w * el.len;
                let (pa, pb) = (1.0 - xi, xi);
                vm[0] += v * pa * pa;
                vm[1] += v * pa * pb;
                vm[2] += v * pb * pb;
            }
            for i in 0..3 {
                k[i] += vm[i];
            }
            let h = el.len;
            (k, [h / 3.0, h / 6.0, h / 3.0])
        })
        .collect();
    let left = if t_lo > 0.0 && problem.mode() == 0 {
        Boundary::Natural
    } else {
        Boundary::Dirichlet
    };
    let first_free = usize::from(left == Boundary::Dirichlet);
    let last_free = mesh.len() - 2;
    let mut pencil = scatter(
        &elements,
        first_free,
        last_free,
        mesh,
        [left, Boundary::Dirichlet],
        Route::Schrodinger,
        problem.gamma(),
        problem.mode(),
    );
    if left == Boundary::Natural {
        let s = mesh.offsets_from_hi()[0] + shift;
        pencil.stiff_diag[0] += 0.5 * problem.log_derivative_at(t_lo, s);
    }
    Ok(pencil)
}

/// Adds element matrices `[aa, ab, bb]` into the free block `first..=last`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn scatter(
    elements: &[([f64; 3], [f64; 3])],
    first: usize,
    last: usize,
    mesh: &Mesh,
    boundary: [Boundary; 2],
    route: Route,
    gamma: f64,
    mode: i64,
) -> TridiagonalPencil {
    let dim = last + 1 - first;
    let mut kd = vec![0.0; dim];
    let mut ko = vec![0.0; dim.saturating_sub(1)];
    let mut md = vec![0.0; dim];
    let mut mo = vec![0.0; dim.saturating_sub(1)];
    for (e, (k, m)) in elements.iter().enumerate() {
        let (a, b) = (e, e + 1);
        let free_a = a >= first && a <= last;
        let free_b = b >= first && b <= last;
        if free_a {
            kd[a - first] += k[0];
            md[a - first] += m[0];
        }
        if free_b {
            kd[b - first] += k[2];
            md[b - first] += m[2];
        }
        if free_a && free_b {
            ko[a - first] += k[1];
            mo[a - first] += m[1];
        }
    }
    TridiagonalPencil {
        stiff_diag: kd,
        stiff_off: ko,
        mass_diag: md,
        mass_off: mo,
        boundary,
        mesh: mesh.clone(),
        dofs: (first..=last).collect(),
        route,
        gamma,
        mode,
    }
}

/// Eigenvalues on a mesh and its bisection, with per-index extrapolation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtrapolatedSpectrum {
    pub coarse: Vec<f64>,
    pub fine: Vec<f64>,
    pub extrapolated: Vec<Extrapolation>,
    pub route: Route,
    pub mesh_nodes: usize,
}

impl ExtrapolatedSpectrum {
    pub fn values(&self) -> Vec<f64> {
        self.extrapolated.iter().map(|e| e.extrapolated).collect()
    }
}

/// Solves a route on `mesh` and `mesh.refined()` and extrapolates.
pub fn extrapolated_spectrum(
    params: &ModelParams,
    route: Route,
    mesh: &Mesh,
    k: usize,
) -> Result<ExtrapolatedSpectrum> {
    let solve = |m: &Mesh| -> Result<Vec<f64>> {
        let pencil = match route {
            Route::Radial => assemble_radial(params, m)?,
            Route::Schrodinger => {
                let problem = RadialProblem::new(params.gamma(), params.mode())?;
                assemble_schrodinger(&problem, m)?
            }
            Route::Hardy => {
                return Err(Error::Parameter("Hardy pencils have no eigenvalue spectrum route".into()))
            }
        };
        Ok(eigenvalues_sturm(&pencil, k, STURM_TOL, false)?.eigenvalues)
    };
    let fine_mesh = mesh.refined();
    let (coarse, fine) = rayon::join(|| solve(mesh), || solve(&fine_mesh));
    let (coarse, fine) = (coarse?, fine?);
    let extrapolated = coarse
        .iter()
        .zip(&fine)
        .map(|(&a, &b)| richardson(a, b))
        .collect();
    Ok(ExtrapolatedSpectrum {
        coarse,
        fine,
        extrapolated,
        route,
        mesh_nodes: mesh.len(),
    })
}

/// Default-mesh extrapolated spectrum for a route.
pub fn default_spectrum(params: &ModelParams, route: Route, k: usize) -> Result<ExtrapolatedSpectrum> {
    let mesh = match route {
        Route::Radial => default_radial_mesh(1.0, DEFAULT_ELEMENTS)?,
        Route::Schrodinger | Route::Hardy => {
            let problem = RadialProblem::new(params.gamma(), params.mode())?;
            default_schrodinger_mesh(&problem, DEFAULT_ELEMENTS)?
        }
    };
    extrapolated_spectrum(params, route, &mesh, k)
}
