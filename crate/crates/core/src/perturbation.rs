//! Eigenvalues of the disc truncated at Riemannian distance `ε` from the
//! boundary: sweeps, convergence rates, the cutoff variational bound,
//! boundary decay of eigenfunctions and the discrete operator-norm chain.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigensolver::{
    assemble_radial, default_radial_mesh, eigenvalues_sturm, Spectrum, TridiagonalPencil,
    DEFAULT_ELEMENTS, STURM_TOL,
};
use crate::error::{Error, Result};
use crate::fit::{log_log_fit, log_space, RateFit};
use crate::geometry::{sigma_from_riem_dist, ModelParams};
use crate::mesh::{Element, End, Mesh};
use crate::quadrature::{distance_hat_moments, gauss12};

/// Gaps below this multiple of the solver tolerance are left out of rate fits.
pub const NOISE_FACTOR: f64 = 100.0;
/// An element containing the truncation point may be at most this fraction
/// of its distance to the boundary.
pub const RESOLUTION: f64 = 0.5;

/// Constants of the boundary-decay and eigenvalue bounds for Hardy constant `c`
/// and shift `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardyBoundConstants {
    pub c: f64,
    pub a: f64,
    /// `c^{2/c} + c^{2/c} (1+c)^{2+2/c}`
    pub c1: f64,
    /// `2 (c1 + c^{2+2/c})`
    pub c_prime: f64,
    /// `2 + 2/c`
    pub decay_exp: f64,
    /// `2/c`
    pub rate_exp: f64,
}

pub fn bound_constants(c: f64, a: f64) -> Result<HardyBoundConstants> {
    if !(c >= 1.0 && c.is_finite()) {
        return Err(Error::Parameter(format!(
            "the bounds assume a Hardy constant c >= 1, got {c}"
        )));
    }
    if !(a >= 0.0 && a.is_finite()) {
        return Err(Error::Parameter(format!("shift a must be nonnegative, got {a}")));
    }
    let p = c.powf(2.0 / c);
    let c1 = p + p * (1.0 + c).powf(2.0 + 2.0 / c);
    Ok(HardyBoundConstants {
        c,
        a,
        c1,
        c_prime: 2.0 * (c1 + c.powf(2.0 + 2.0 / c)),
        decay_exp: 2.0 + 2.0 / c,
        rate_exp: 2.0 / c,
    })
}

/// Euclidean distance `σ_ε = ((1-γ) ε)^{1/(1-γ)}` of the truncation point.
pub fn truncation_sigma(eps: f64, gamma: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::Parameter(format!("eps must be positive, got {eps}")));
    }
    let s = sigma_from_riem_dist(eps, gamma)?;
    if s >= 1.0 {
        return Err(Error::Domain(format!(
            "eps = {eps} reaches the centre (collar threshold sigma = {s} >= 1)"
        )));
    }
    Ok(s)
}

fn check_resolved(mesh: &Mesh, sigma: f64) -> Result<()> {
    let (_, hi) = mesh.interval();
    let offset = sigma - (1.0 - hi);
    if offset <= 0.0 {
        return Err(Error::Domain(format!("sigma = {sigma} lies outside the mesh")));
    }
    let j = mesh.nearest_node(offset, End::Hi);
    let local = [j.saturating_sub(1), j.min(mesh.elements() - 1)]
        .iter()
        .map(|&e| mesh.gaps()[e])
        .fold(0.0, f64::max);
    if local > RESOLUTION * sigma {
        return Err(Error::MeshResolution(format!(
            "elements of size {local:.3e} near sigma = {sigma:.3e} cannot resolve the truncation"
        )));
    }
    Ok(())
}

/// Eigenvalues of the full and truncated problems on one mesh.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub params: ModelParams,
    pub eps_list: Vec<f64>,
    /// Euclidean distance of each truncation node.
    pub sigma_list: Vec<f64>,
    /// Distance between the requested truncation point and the node used.
    pub snap_errors: Vec<f64>,
    pub lambda_full: Vec<f64>,
    /// `lambda_eps[i][j]`: eigenvalue `j` with truncation `eps_list[i]`.
    pub lambda_eps: Vec<Vec<f64>>,
    pub gaps: Vec<Vec<f64>>,
    /// Upper bound for `lambda_eps[i][j]` from the cutoff trial space.
    pub variational_bounds: Vec<Vec<f64>>,
    /// Closed-form bound, absent when `ε` is too large for it.
    pub closed_form_bounds: Vec<Vec<Option<f64>>>,
    pub tolerance: f64,
    pub mesh: Mesh,
    #[serde(skip)]
    pub full: Option<Spectrum>,
}

impl SweepTable {
    pub fn k(&self) -> usize {
        self.lambda_full.len()
    }
}

/// Default fine mesh for sweeps: graded toward `r = 1`.
pub fn default_sweep_mesh() -> Result<Mesh> {
    default_radial_mesh(1.0, DEFAULT_ELEMENTS)
}

/// `count` log-spaced values on `[lo, hi]`.
pub fn eps_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo) || count < 2 {
        return Err(Error::Input(format!(
            "eps grid needs 0 < lo < hi and at least 2 points, got [{lo}, {hi}] x {count}"
        )));
    }
    Ok(log_space(lo, hi, count))
}

/// Truncated spectra for every `ε`, with all truncation nodes inserted
/// into `mesh` first so the full and truncated problems share one discretization.
pub fn truncated_sweep(
    params: &ModelParams,
    eps_list: &[f64],
    k: usize,
    mesh: &Mesh,
) -> Result<SweepTable> {
    if eps_list.is_empty() {
        return Err(Error::Input("empty eps list".into()));
    }
    let gamma = params.gamma();
    let sigmas = eps_list
        .iter()
        .map(|&e| truncation_sigma(e, gamma))
        .collect::<Result<Vec<f64>>>()?;
    let shift = 1.0 - mesh.interval().1;
    let mut augmented = mesh.clone();
    for &s in &sigmas {
        check_resolved(mesh, s)?;
        augmented = augmented.with_node(s - shift, End::Hi, 1e-9)?.0;
    }
    let nodes: Vec<(usize, f64)> = sigmas
        .iter()
        .map(|&s| {
            let j = augmented.nearest_node(s - shift, End::Hi);
            (j, (augmented.offsets_from_hi()[j] + shift - s).abs())
        })
        .collect();
    let pencil = assemble_radial(params, &augmented)?;
    let full = eigenvalues_sturm(&pencil, k, STURM_TOL, true)?;
    let first = pencil.dofs[0];
    let lambda_eps = nodes
        .par_iter()
        .map(|&(j, _)| {
            let cut = pencil.leading(j - first)?;
            Ok(eigenvalues_sturm(&cut, k, STURM_TOL, false)?.eigenvalues)
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    let gaps = lambda_eps
        .iter()
        .map(|row| row.iter().zip(&full.eigenvalues).map(|(a, b)| a - b).collect())
        .collect();
    let constants = bound_constants(params.hardy_c(), params.shift())?;
    let variational_bounds = eps_list
        .par_iter()
        .map(|&e| {
            (1..=k)
                .map(|dim| variational_bound(&full, e, dim))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    let closed_form_bounds = eps_list
        .iter()
        .map(|&e| {
            full.eigenvalues
                .iter()
                .map(|&l| closed_form_bound(l, e, &constants))
                .collect()
        })
        .collect();
    Ok(SweepTable {
        params: *params,
        eps_list: eps_list.to_vec(),
        sigma_list: sigmas,
        snap_errors: nodes.iter().map(|n| n.1).collect(),
        lambda_full: full.eigenvalues.clone(),
        lambda_eps,
        gaps,
        variational_bounds,
        closed_form_bounds,
        tolerance: STURM_TOL,
        mesh: augmented,
        full: Some(full),
    })
}

/// Slope of `log gap` against `log ε` for one eigenvalue index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateReport {
    pub index: usize,
    pub fit: RateFit,
    /// `1/(1-γ)` on the disc, `(1+(N-2)γ)/(1-γ)` in general.
    pub target: f64,
    /// Values of `ε` whose gap fell below the noise floor.
    pub excluded: Vec<f64>,
}

impl RateReport {
    pub fn within(&self, tol: f64) -> bool {
        (self.fit.exponent - self.target).abs() <= tol
    }
}

pub fn rate_fit(sweep: &SweepTable, index: usize) -> Result<RateReport> {
    if index >= sweep.k() {
        return Err(Error::Parameter(format!(
            "eigenvalue index {index} outside the {} computed",
            sweep.k()
        )));
    }
    let floor = NOISE_FACTOR * sweep.tolerance;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut excluded = Vec::new();
    for (e, row) in sweep.eps_list.iter().zip(&sweep.gaps) {
        if row[index] > floor {
            xs.push(*e);
            ys.push(row[index]);
        } else {
            excluded.push(*e);
        }
    }
    if xs.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "only {} of {} gaps exceed the noise floor {floor:e}",
            xs.len(),
            sweep.eps_list.len()
        )));
    }
    Ok(RateReport {
        index,
        fit: log_log_fit(&xs, &ys)?,
        target: sweep.params.rate_exp(),
        excluded,
    })
}

/// Piecewise-linear cutoff: 0 up to `ε`, linear to 1 at `2ε`, then 1.
pub fn cutoff_mu(d: f64, eps: f64) -> f64 {
    ((d - eps) / eps).clamp(0.0, 1.0)
}

/// Radial element viewed in the boundary distance `σ = 1 - r`.
struct SigmaElement {
    el: Element,
    /// `σ` at the left node (the larger value).
    sa: f64,
    /// `σ` at the right node.
    sb: f64,
}

impl SigmaElement {
    fn new(el: Element, shift: f64) -> Self {
        Self {
            el,
            sa: el.from_hi.0 + shift,
            sb: el.from_hi.1 + shift,
        }
    }

    fn r(&self, sigma: f64) -> f64 {
        self.el.a + (self.sa - sigma)
    }

    /// Weight of the left node at `σ`.
    fn left(&self, sigma: f64) -> f64 {
        (sigma - self.sb) / (self.sa - self.sb)
    }

    /// Gauss points in `σ` over the parts of `[sb, sa]` cut at `breaks`,
    /// restricted to `σ ≥ floor`.
    fn points(&self, breaks: &[f64], floor: f64) -> Vec<(f64, f64)> {
        let mut cuts = vec![self.sb.max(floor)];
        cuts.extend(breaks.iter().copied().filter(|&b| b > self.sb.max(floor) && b < self.sa));
        cuts.push(self.sa);
        let mut pts = Vec::new();
        for w in cuts.windows(2) {
            if w[1] > w[0] {
                pts.extend(gauss12().points(w[0], w[1]));
            }
        }
        pts
    }
}

/// Upper bound for `λ_{dim, ε}` from the trial space `{μ φ : φ ∈ span(φ_1..φ_dim)}`
/// built on the full-problem eigenvectors.
pub fn variational_bound(full: &Spectrum, eps: f64, dim: usize) -> Result<f64> {
    let vecs = full
        .eigenvectors
        .as_ref()
        .ok_or_else(|| Error::Input("variational bound needs eigenvectors".into()))?;
    if dim == 0 || dim > vecs.len() {
        return Err(Error::Parameter(format!(
            "trial dimension {dim} outside 1..={}",
            vecs.len()
        )));
    }
    let gamma = full.provenance.gamma;
    let n2 = (full.provenance.mode.unsigned_abs() as f64).powi(2);
    let mesh = &full.provenance.mesh;
    let s_eps = truncation_sigma(eps, gamma)?;
    let s_2eps = truncation_sigma(2.0 * eps, gamma)?;
    check_resolved(mesh, s_eps)?;
    let nodal: Vec<Vec<f64>> = (0..dim).map(|j| full.nodal(j).unwrap()).collect();
    let shift = 1.0 - mesh.interval().1;
    let mut a = DMatrix::<f64>::zeros(dim, dim);
    let mut b = DMatrix::<f64>::zeros(dim, dim);
    let mut f = vec![0.0; dim];
    let mut df = vec![0.0; dim];
    for e in 0..mesh.elements() {
        let se = SigmaElement::new(mesh.element(e), shift);
        if se.sa <= s_eps {
            continue;
        }
        for (sigma, w) in se.points(&[s_2eps], s_eps) {
            let r = se.r(sigma);
            let d = sigma.powf(1.0 - gamma) / (1.0 - gamma);
            let mu = cutoff_mu(d, eps);
            let dmu = if d > eps && d < 2.0 * eps {
                -sigma.powf(-gamma) / eps
            } else {
                0.0
            };
            let la = se.left(sigma);
            for j in 0..dim {
                let (va, vb) = (nodal[j][e], nodal[j][e + 1]);
                let phi = va * la + vb * (1.0 - la);
                let dphi = (vb - va) / se.el.len;
                f[j] = mu * phi;
                df[j] = dmu * phi + mu * dphi;
            }
            let wm = w * r * sigma.powf(-2.0 * gamma);
            for i in 0..dim {
                for j in 0..=i {
                    let q = w * (df[i] * df[j] * r + n2 * f[i] * f[j] / r);
                    a[(i, j)] += q;
                    b[(i, j)] += wm * f[i] * f[j];
                }
            }
        }
    }
    for i in 0..dim {
        for j in 0..i {
            a[(j, i)] = a[(i, j)];
            b[(j, i)] = b[(i, j)];
        }
    }
    largest_generalized(&a, &b)
}

/// Largest eigenvalue of `A x = λ B x` with `B` positive definite.
fn largest_generalized(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<f64> {
    let chol = b
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Numerical("trial-space Gram matrix is not positive definite".into()))?;
    let l = chol.l();
    let li = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Numerical("singular Cholesky factor".into()))?;
    let c = &li * a * li.transpose();
    let c = 0.5 * (&c + c.transpose());
    let eig = SymmetricEigen::new(c);
    Ok(eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max))
}

/// `(λ + c′ε^{2/c}(λ+a)^{1+1/c}) / (1 - c^{1+1/c} ε^{1+1/c} (λ+a)^{(1+1/c)/2})`,
/// or `None` when the denominator is not positive.
pub fn closed_form_bound(lambda: f64, eps: f64, k: &HardyBoundConstants) -> Option<f64> {
    let c = k.c;
    let la = lambda + k.a;
    let e = 1.0 + 1.0 / c;
    let den = 1.0 - c.powf(e) * eps.powf(e) * la.powf(0.5 * e);
    if den <= 0.0 {
        return None;
    }
    Some((lambda + k.c_prime * eps.powf(2.0 / c) * la.powf(e)) / den)
}

/// One row of a boundary-decay check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub eps: f64,
    /// `∫_{d<ε} |φ|² dvol`
    pub mass: f64,
    pub mass_bound: f64,
    /// `∫_{d<ε} |∇φ|² dvol`
    pub energy: f64,
    pub energy_bound: f64,
}

/// Collar integrals of an eigenfunction against their bounds, with fitted exponents.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    pub lambda: f64,
    pub rows: Vec<DecayRow>,
    pub mass_fit: RateFit,
    pub energy_fit: RateFit,
    /// `2 + 2/c`
    pub mass_target: f64,
    /// `2/c`
    pub energy_target: f64,
}

impl DecayReport {
    pub fn bounds_hold(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.mass <= r.mass_bound && r.energy <= r.energy_bound)
    }
}

/// Collar mass and energy of eigenfunction `index` of `full` for each `ε`.
pub fn boundary_decay_check(
    full: &Spectrum,
    index: usize,
    eps_grid: &[f64],
    constants: &HardyBoundConstants,
) -> Result<DecayReport> {
    let phi = full
        .nodal(index)
        .ok_or_else(|| Error::Input(format!("no eigenvector {index} in the spectrum")))?;
    let lambda = full.eigenvalues[index];
    let gamma = full.provenance.gamma;
    let n2 = (full.provenance.mode.unsigned_abs() as f64).powi(2);
    let mesh = &full.provenance.mesh;
    let shift = 1.0 - mesh.interval().1;
    let c = constants.c;
    let la = lambda + constants.a;
    let mut rows = Vec::with_capacity(eps_grid.len());
    for &eps in eps_grid {
        let s_eps = truncation_sigma(eps, gamma)?;
        check_resolved(mesh, s_eps)?;
        let (mut mass, mut energy) = (0.0, 0.0);
        for e in (0..mesh.elements()).rev() {
            let se = SigmaElement::new(mesh.element(e), shift);
            if se.sb >= s_eps {
                break;
            }
            let top = se.sa.min(s_eps);
            let (ga, gb) = (phi[e], phi[e + 1]);
            let g_at = |s: f64| gb + (ga - gb) * se.left(s);
            let (g0, g1) = (g_at(se.sb), g_at(top));
            let u = distance_hat_moments(se.sb, top, -2.0 * gamma);
            let v = distance_hat_moments(se.sb, top, 1.0 - 2.0 * gamma);
            let quad = |m: [f64; 3]| g0 * g0 * m[0] + 2.0 * g0 * g1 * m[1] + g1 * g1 * m[2];
            mass += quad(u) - quad(v);
            let slope = (gb - ga) / se.el.len;
            let len = top - se.sb;
            energy += slope * slope * len * (1.0 - 0.5 * (se.sb + top));
            if n2 > 0.0 {
                energy += n2
                    * gauss12().integrate(se.sb, top, |s| g_at(s).powi(2) / se.r(s));
            }
        }
        rows.push(DecayRow {
            eps,
            mass,
            mass_bound: c.powf(2.0 + 2.0 / c) * eps.powf(2.0 + 2.0 / c) * la.powf(1.0 + 1.0 / c),
            energy,
            energy_bound: constants.c1 * eps.powf(2.0 / c) * la.powf(1.0 + 1.0 / c),
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.eps).collect();
    let mass_fit = log_log_fit(&xs, &rows.iter().map(|r| r.mass).collect::<Vec<_>>())?;
    let energy_fit = log_log_fit(&xs, &rows.iter().map(|r| r.energy).collect::<Vec<_>>())?;
    Ok(DecayReport {
        lambda,
        rows,
        mass_fit,
        energy_fit,
        mass_target: constants.decay_exp,
        energy_target: constants.rate_exp,
    })
}

/// Dense spectral data of a pencil: `K V = M V D`, `Vᵀ M V = I`.
struct DenseSpectral {
    k: DMatrix<f64>,
    m: DMatrix<f64>,
    /// Lower Cholesky factor of `M` and its inverse.
    l_inv: DMatrix<f64>,
    v: DMatrix<f64>,
    d: DVector<f64>,
}

fn dense(diag: &[f64], off: &[f64]) -> DMatrix<f64> {
    let n = diag.len();
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        a[(i, i)] = diag[i];
        if i + 1 < n {
            a[(i, i + 1)] = off[i];
            a[(i + 1, i)] = off[i];
        }
    }
    a
}

fn dense_spectral(pencil: &TridiagonalPencil, shift: f64) -> Result<DenseSpectral> {
    let k = dense(&pencil.stiff_diag, &pencil.stiff_off);
    let m = dense(&pencil.mass_diag, &pencil.mass_off);
    let l = m
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Numerical("mass matrix is not positive definite".into()))?
        .l();
    let l_inv = l
        .try_inverse()
        .ok_or_else(|| Error::Numerical("singular mass factor".into()))?;
    let ks = &k + shift * &m;
    let c = &l_inv * ks * l_inv.transpose();
    let eig = SymmetricEigen::new(0.5 * (&c + c.transpose()));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let n = order.len();
    let q = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    let d = DVector::from_fn(n, |i, _| eig.eigenvalues[order[i]]);
    let v = l_inv.transpose() * q;
    Ok(DenseSpectral { k, m, l_inv, v, d })
}

/// Tridiagonal matrix of `∫ max(d, ε)^{-2p/c} φ_i φ_j dvol` over the pencil's unknowns.
fn cutoff_weight_matrix(pencil: &TridiagonalPencil, eps: f64, p: f64, c: f64) -> Result<DMatrix<f64>> {
    let gamma = pencil.gamma;
    let mesh = &pencil.mesh;
    let shift = 1.0 - mesh.interval().1;
    let s_eps = truncation_sigma(eps, gamma)?;
    let n = mesh.len();
    let mut full_diag = vec![0.0; n];
    let mut full_off = vec![0.0; n - 1];
    for e in 0..mesh.elements() {
        let se = SigmaElement::new(mesh.element(e), shift);
        let mut m = [0.0; 3];
        for (sigma, w) in se.points(&[s_eps], 0.0) {
            let d = (sigma.powf(1.0 - gamma) / (1.0 - gamma)).max(eps);
            let wt = w * d.powf(-2.0 * p / c) * se.r(sigma) * sigma.powf(-2.0 * gamma);
            let la = se.left(sigma);
            let lb = 1.0 - la;
            m[0] += wt * la * la;
            m[1] += wt * la * lb;
            m[2] += wt * lb * lb;
        }
        full_diag[e] += m[0];
        full_diag[e + 1] += m[2];
        full_off[e] += m[1];
    }
    let dofs = &pencil.dofs;
    let diag: Vec<f64> = dofs.iter().map(|&i| full_diag[i]).collect();
    let off: Vec<f64> = dofs.windows(2).map(|w| full_off[w[0]]).collect();
    Ok(dense(&diag, &off))
}

/// Outcome of the discrete operator-norm chain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormChainReport {
    pub eps: f64,
    pub shift: f64,
    /// True when the shift had to be raised above the requested one.
    pub shift_inflated: bool,
    /// `‖w^c (H+a)^{-1/2}‖ / c`
    pub premise_hardy: f64,
    /// `‖w^{2-c} (H+a)^{-(2-c)/(2c)}‖ / c^{(2-c)/c}`
    pub premise_interpolated: f64,
    pub samples: usize,
    pub seed: u64,
    pub violations: usize,
    /// Smallest `(right - left) / right` over the samples.
    pub min_relative_margin: f64,
    /// `(left, right)` for the lowest eigenvector.
    pub lowest_mode: (f64, f64),
}

impl NormChainReport {
    pub fn passed(&self) -> bool {
        self.premise_hardy <= 1.0 + 1e-10
            && self.premise_interpolated <= 1.0 + 1e-10
            && self.violations == 0
    }
}

/// Largest eigenvalue of `Xᵀ W X` for `X = V diag(scale)`.
fn weighted_norm_sq(sp: &DenseSpectral, w: &DMatrix<f64>, scale: &DVector<f64>) -> f64 {
    let x = &sp.v * DMatrix::from_diagonal(scale);
    let g = x.transpose() * w * x;
    let eig = SymmetricEigen::new(0.5 * (&g + g.transpose()));
    eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Checks the premises `‖w^c (H+a)^{-1/2}‖ ≤ c` and
/// `‖w^{2-c} (H+a)^{-(2-c)/(2c)}‖ ≤ c^{(2-c)/c}` by dense spectral calculus,
/// then `|⟨(H+a) f, w² f⟩| ≤ c^{2/c} ‖(H+a)^{1/2+1/c} f‖ ‖(H+a)^{1/2} f‖`
/// on `samples` random `f` from the span of the lowest `modes` eigenvectors.
pub fn discrete_norm_inequality_check(
    pencil: &TridiagonalPencil,
    constants: &HardyBoundConstants,
    eps: f64,
    samples: usize,
    modes: usize,
    seed: u64,
) -> Result<NormChainReport> {
    let c = constants.c;
    let theta = (2.0 - c) / c;
    let w_c = cutoff_weight_matrix(pencil, eps, c, c)?;
    let w_2c = cutoff_weight_matrix(pencil, eps, 2.0 - c, c)?;
    let w_1 = cutoff_weight_matrix(pencil, eps, 1.0, c)?;
    let mut shift = constants.a;
    let mut inflated = false;
    let (sp, p1, p2) = loop {
        let sp = dense_spectral(pencil, shift)?;
        let p1 = weighted_norm_sq(&sp, &w_c, &sp.d.map(|x| x.powf(-0.5))).sqrt() / c;
        let p2 = weighted_norm_sq(&sp, &w_2c, &sp.d.map(|x| x.powf(-0.5 * theta))).sqrt()
            / c.powf(theta);
        if p1 <= 1.0 + 1e-10 && p2 <= 1.0 + 1e-10 {
            break (sp, p1, p2);
        }
        let next = if shift == 0.0 { 1e-8 * sp.d[0].abs().max(1.0) } else { 10.0 * shift };
        if next > 1e3 * sp.d[0].abs().max(1.0) {
            return Ok(NormChainReport {
                eps,
                shift,
                shift_inflated: inflated,
                premise_hardy: p1,
                premise_interpolated: p2,
                samples: 0,
                seed,
                violations: 0,
                min_relative_margin: f64::NAN,
                lowest_mode: (f64::NAN, f64::NAN),
            });
        }
        shift = next;
        inflated = true;
    };
    let modes = modes.min(sp.d.len());
    let x = sp.v.transpose() * &w_1 * &sp.v;
    let sides = |alpha: &DVector<f64>| {
        let da = alpha.component_mul(&sp.d);
        let left = (da.transpose() * &x * alpha)[(0, 0)].abs();
        let hi = alpha.component_mul(&sp.d.map(|v| v.powf(0.5 + 1.0 / c)));
        let lo = alpha.component_mul(&sp.d.map(|v| v.sqrt()));
        (left, c.powf(2.0 / c) * hi.norm() * lo.norm())
    };
    let n = sp.d.len();
    let mut e1 = DVector::zeros(n);
    e1[0] = 1.0;
    let lowest_mode = sides(&e1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0;
    let mut min_margin = f64::INFINITY;
    for _ in 0..samples {
        let mut alpha = DVector::zeros(n);
        for i in 0..modes {
            alpha[i] = rng.gen_range(-1.0..1.0);
        }
        let (left, right) = sides(&alpha);
        if left > right * (1.0 + 1e-12) {
            violations += 1;
        }
        min_margin = min_margin.min((right - left) / right);
    }
    Ok(NormChainReport {
        eps,
        shift,
        shift_inflated: inflated,
        premise_hardy: p1,
        premise_interpolated: p2,
        samples,
        seed,
        violations,
        min_relative_margin: min_margin,
        lowest_mode,
    })
}

/// Default pencil for the norm chain: the disc with a few hundred unknowns.
pub fn norm_chain_pencil(params: &ModelParams, elements: usize) -> Result<TridiagonalPencil> {
    let mesh = Mesh::graded(
        0.0,
        1.0,
        elements,
        crate::mesh::Grading::GeometricRight { ratio: 0.85 },
        1e-6,
    )?;
    assemble_radial(params, &mesh)
}

/// `A^s` for symmetric positive semidefinite `A`.
pub fn matrix_power(a: &DMatrix<f64>, s: f64) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(0.5 * (a + a.transpose()));
    let d = eig.eigenvalues.map(|x| x.max(0.0).powf(s));
    &eig.eigenvectors * DMatrix::from_diagonal(&d) * eig.eigenvectors.transpose()
}

/// Smallest eigenvalue of `B^s - A^s`; nonnegative when the order is preserved.
pub fn lowner_heinz_margin(a: &DMatrix<f64>, b: &DMatrix<f64>, s: f64) -> f64 {
    let diff = matrix_power(b, s) - matrix_power(a, s);
    let eig = SymmetricEigen::new(0.5 * (&diff + diff.transpose()));
    eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Order preservation under fractional powers for a matrix pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LownerHeinzReport {
    /// Smallest eigenvalue of `B - A` relative to `‖B‖`.
    pub premise_margin: f64,
    /// `(s, smallest eigenvalue of B^s - A^s relative to ‖B‖^s)`
    pub margins: Vec<(f64, f64)>,
}

impl LownerHeinzReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.premise_margin >= -tol && self.margins.iter().all(|m| m.1 >= -tol)
    }
}

pub fn lowner_heinz_pair(a: &DMatrix<f64>, b: &DMatrix<f64>, exponents: &[f64]) -> LownerHeinzReport {
    let scale = SymmetricEigen::new(b.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(0.0f64, |m, x| m.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    LownerHeinzReport {
        premise_margin: lowner_heinz_margin(a, b, 1.0) / scale,
        margins: exponents
            .iter()
            .map(|&s| (s, lowner_heinz_margin(a, b, s) / scale.powf(s)))
            .collect(),
    }
}

/// The pair `A = W_c / c²`, `B = K + aM` of a pencil, in the coordinates
/// where `M` is the identity.
pub fn hardy_operator_pair(
    pencil: &TridiagonalPencil,
    constants: &HardyBoundConstants,
    eps: f64,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let sp = dense_spectral(pencil, constants.a)?;
    let w = cutoff_weight_matrix(pencil, eps, constants.c, constants.c)?;
    let a = &sp.l_inv * w * sp.l_inv.transpose() / (constants.c * constants.c);
    let b = &sp.l_inv * (&sp.k + constants.a * &sp.m) * sp.l_inv.transpose();
    Ok((0.5 * (&a + a.transpose()), 0.5 * (&b + b.transpose())))
}

/// Non-commuting pair with `0 ≤ A ≤ B` but `A² ≰ B²`.
pub fn lowner_heinz_counterexample() -> (DMatrix<f64>, DMatrix<f64>) {
    (
        DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]),
        DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 1.0]),
    )
}
