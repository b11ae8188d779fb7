//! Boundary distances, collar volumes and Minkowski exponents for the metric
//! `ds² = σ^{-2γ} |dx|²`, with `σ` the Euclidean distance to the boundary.

mod geodesic;

pub use geodesic::{geodesic_field, GeodesicField, Stencil};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{log_log_fit, RateFit};
use crate::quadrature::adaptive_gk;

/// Relative tolerance for collar volumes evaluated by quadrature.
pub const COLLAR_QUAD_RTOL: f64 = 1e-10;

/// Dimension, singularity exponent, angular mode and Hardy shift of a model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    dim: usize,
    gamma: f64,
    mode: i64,
    shift: f64,
}

impl ModelParams {
    pub fn new(dim: usize, gamma: f64, mode: i64, shift: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Parameter(format!("dimension N must be at least 2, got {dim}")));
        }
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::Parameter(format!("gamma must be nonnegative, got {gamma}")));
        }
        if dim as f64 * gamma >= 1.0 {
            return Err(Error::Parameter(format!(
                "constraint 0 <= N*gamma < 1 violated: N={dim}, gamma={gamma}, N*gamma={}",
                dim as f64 * gamma
            )));
        }
        if !shift.is_finite() || shift < 0.0 {
            return Err(Error::Parameter(format!("Hardy shift a must be nonnegative, got {shift}")));
        }
        Ok(Self {
            dim,
            gamma,
            mode,
            shift,
        })
    }

    /// Unit disc (`N = 2`) with zero Hardy shift.
    pub fn disc(gamma: f64, mode: i64) -> Result<Self> {
        Self::new(2, gamma, mode, 0.0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn mode(&self) -> i64 {
        self.mode
    }

    /// `|n|`, the only part of the mode the radial problem sees.
    pub fn abs_mode(&self) -> u64 {
        self.mode.unsigned_abs()
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// Riemannian distance from the centre to the boundary, `1/(1-γ)`.
    pub fn t_max(&self) -> f64 {
        1.0 / (1.0 - self.gamma)
    }

    /// Sharp strong Hardy constant `2(1-γ)/(1+(N-2)γ)` of a convex domain.
    pub fn hardy_c(&self) -> f64 {
        2.0 * (1.0 - self.gamma) / (1.0 + (self.dim as f64 - 2.0) * self.gamma)
    }

    /// Interior Minkowski dimension `(N-1)/(1-γ)` of the boundary.
    pub fn mink_dim(&self) -> f64 {
        (self.dim as f64 - 1.0) / (1.0 - self.gamma)
    }

    /// Collar-volume exponent `N - mink_dim`.
    pub fn collar_exponent(&self) -> f64 {
        self.dim as f64 - self.mink_dim()
    }

    /// Boundary-decay exponent `2 + 2/c`.
    pub fn decay_exp(&self) -> f64 {
        2.0 + 2.0 / self.hardy_c()
    }

    /// Eigenvalue perturbation exponent `2/c = (1+(N-2)γ)/(1-γ)`.
    pub fn rate_exp(&self) -> f64 {
        2.0 / self.hardy_c()
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma.is_finite() && (0.0..1.0).contains(&gamma)) {
        return Err(Error::Parameter(format!("gamma must lie in [0, 1), got {gamma}")));
    }
    Ok(())
}

/// Euclidean distance `1 - |x|` from a point of the closed unit disc to the circle.
pub fn sigma_disc(x: [f64; 2]) -> Result<f64> {
    let r = x[0].hypot(x[1]);
    if !(r <= 1.0) {
        return Err(Error::Domain(format!(
            "point ({}, {}) lies outside the closed unit disc",
            x[0], x[1]
        )));
    }
    Ok(1.0 - r)
}

/// Riemannian boundary distance `σ^{1-γ}/(1-γ)`.
pub fn riem_dist_to_boundary(sigma: f64, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if !(sigma >= 0.0) {
        return Err(Error::Domain(format!("sigma must be nonnegative, got {sigma}")));
    }
    Ok(sigma.powf(1.0 - gamma) / (1.0 - gamma))
}

/// Inverse of [`riem_dist_to_boundary`]: `((1-γ) d)^{1/(1-γ)}`.
pub fn sigma_from_riem_dist(d: f64, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if !(d >= 0.0) {
        return Err(Error::Domain(format!("distance must be nonnegative, got {d}")));
    }
    Ok(((1.0 - gamma) * d).powf(1.0 / (1.0 - gamma)))
}

/// Surface area of the unit sphere in `R^N`.
pub fn unit_sphere_area(dim: usize) -> f64 {
    // Γ(N/2) by the half-integer recursion
    let mut gamma_half = if dim.is_multiple_of(2) { 1.0 } else { PI.sqrt() };
    let mut k = if dim.is_multiple_of(2) { 1.0 } else { 0.5 };
    while k < dim as f64 / 2.0 - 1e-12 {
        gamma_half *= k;
        k += 1.0;
    }
    2.0 * PI.powf(dim as f64 / 2.0) / gamma_half
}

/// Riemannian volume of the collar `{x : d(x) < ε}` in the unit ball.
///
/// The collar is `{σ < s₀}` with `s₀ = ((1-γ)ε)^{1/(1-γ)}` and volume
/// `|S^{N-1}| ∫₀^{s₀} s^{-Nγ} (1-s)^{N-1} ds`.
pub fn collar_volume(eps: f64, params: &ModelParams) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("collar width must be positive, got {eps}")));
    }
    let gamma = params.gamma();
    let s0 = sigma_from_riem_dist(eps, gamma)?;
    if s0 >= 1.0 {
        return Err(Error::Domain(format!(
            "collar threshold sigma={s0} reaches the domain size (eps={eps} >= t_max={})",
            params.t_max()
        )));
    }
    let n = params.dim();
    if n == 2 {
        let e1 = 1.0 - 2.0 * gamma;
        let e2 = 2.0 - 2.0 * gamma;
        return Ok(2.0 * PI * (s0.powf(e1) / e1 - s0.powf(e2) / e2));
    }
    // u = s^β/β removes the endpoint singularity: ds s^{-Nγ} = du
    let beta = 1.0 - n as f64 * gamma;
    let u0 = s0.powf(beta) / beta;
    let integral = adaptive_gk(
        |u: f64| {
            let s = (beta * u).powf(1.0 / beta);
            (1.0 - s).powi(n as i32 - 1)
        },
        0.0,
        u0,
        COLLAR_QUAD_RTOL,
    )?;
    Ok(unit_sphere_area(n) * integral)
}

/// Slope of `ln collar_volume` against `ln ε`; estimates `N - (N-1)/(1-γ)`.
pub fn minkowski_fit(eps_grid: &[f64], params: &ModelParams) -> Result<RateFit> {
    if eps_grid.len() < 4 {
        return Err(Error::Input(format!(
            "Minkowski fit needs at least 4 collar widths, got {}",
            eps_grid.len()
        )));
    }
    let volumes = eps_grid
        .iter()
        .map(|&e| collar_volume(e, params))
        .collect::<Result<Vec<_>>>()?;
    log_log_fit(eps_grid, &volumes)
}
