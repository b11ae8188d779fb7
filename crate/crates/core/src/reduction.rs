//! Change of variables taking the weighted radial problem on the disc to a
//! Schrödinger equation `-h'' + V h = λ h` on `(0, t_max)`.
//!
//! With `α = t_max = 1/(1-γ)` and `u = 1 - t/α`, the warp is
//! `r = w(t) = 1 - u^α`, so `1 - r = u^α` and `t_max - t` is the Riemannian
//! distance to the boundary. Most functions take the pair `(t, s)` with
//! `s = t_max - t` so that points very close to the boundary keep their
//! relative precision.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::Mesh;

/// Radial mode `n` of the disc problem for singularity exponent `γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialProblem {
    gamma: f64,
    mode: i64,
    t_max: f64,
}

impl RadialProblem {
    pub fn new(gamma: f64, mode: i64) -> Result<Self> {
        if !(0.0..0.5).contains(&gamma) {
            return Err(Error::Parameter(format!(
                "the disc requires 0 <= gamma < 1/2 (constraint 0 <= N*gamma < 1 with N=2), got {gamma}"
            )));
        }
        Ok(Self {
            gamma,
            mode,
            t_max: 1.0 / (1.0 - gamma),
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn mode(&self) -> i64 {
        self.mode
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    /// `n² - 1/4`
    pub fn centrifugal(&self) -> f64 {
        let n = self.mode as f64;
        n * n - 0.25
    }

    /// `(2γ - γ²) / (4 (1-γ)²)`
    pub fn boundary_coefficient(&self) -> f64 {
        let g = self.gamma;
        (2.0 * g - g * g) / (4.0 * (1.0 - g) * (1.0 - g))
    }

    fn check(&self, t: f64, s: f64) -> Result<()> {
        if !(t > 0.0 && s > 0.0 && t < self.t_max) {
            return Err(Error::Domain(format!(
                "t = {t} outside the open interval (0, {})",
                self.t_max
            )));
        }
        Ok(())
    }

    /// `ln u`, taken from whichever of `t`, `s` is the smaller.
    fn ln_u(&self, t: f64, s: f64) -> f64 {
        if t < s {
            (-t / self.t_max).ln_1p()
        } else {
            (s / self.t_max).ln()
        }
    }

    /// `w(t)` from `(t, s)`.
    fn warp_ts(&self, t: f64, s: f64) -> f64 {
        -(self.t_max * self.ln_u(t, s)).exp_m1()
    }

    /// `w^{(k)}(t)` for `k = 1, 2, 3`.
    fn warp_deriv_ts(&self, t: f64, s: f64, k: u32) -> f64 {
        let a = self.t_max;
        let g = self.gamma;
        let lu = self.ln_u(t, s);
        match k {
            1 => ((a - 1.0) * lu).exp(),
            2 => -g * ((a - 2.0) * lu).exp(),
            3 => g * (2.0 * g - 1.0) * ((a - 3.0) * lu).exp(),
            _ => unreachable!("only first three derivatives are provided"),
        }
    }

    /// `V(t)` from the closed form, given `t` and `s = t_max - t`.
    pub fn potential_at(&self, t: f64, s: f64) -> f64 {
        let a = self.t_max;
        let lu = self.ln_u(t, s);
        let w = -(a * lu).exp_m1();
        let tail = (2.0 * self.gamma * a * lu).exp() / (w * w);
        self.boundary_coefficient() / (s * s) + self.centrifugal() * tail
    }

    /// `ρ = a'/a` with `a = w/w'`; the boundary term of the transformed form.
    pub fn log_derivative_at(&self, t: f64, s: f64) -> f64 {
        self.warp_deriv_ts(t, s, 1) / self.warp_ts(t, s) + self.gamma * self.t_max / s
    }

    /// `√(w/w')`, the factor relating `h` to `g`.
    pub fn transport_factor_at(&self, t: f64, s: f64) -> f64 {
        (self.warp_ts(t, s) / self.warp_deriv_ts(t, s, 1)).sqrt()
    }

    /// Euclidean distance `1 - w(t)` to the boundary from `s = t_max - t`.
    pub fn sigma_at(&self, s: f64) -> f64 {
        ((1.0 - self.gamma) * s).powf(self.t_max)
    }
}

/// `w(t)`.
pub fn warp(t: f64, problem: &RadialProblem) -> Result<f64> {
    let s = problem.t_max - t;
    problem.check(t, s)?;
    Ok(problem.warp_ts(t, s))
}

/// `w'(t)`.
pub fn warp_d1(t: f64, problem: &RadialProblem) -> Result<f64> {
    let s = problem.t_max - t;
    problem.check(t, s)?;
    Ok(problem.warp_deriv_ts(t, s, 1))
}

/// `w''(t)`.
pub fn warp_d2(t: f64, problem: &RadialProblem) -> Result<f64> {
    let s = problem.t_max - t;
    problem.check(t, s)?;
    Ok(problem.warp_deriv_ts(t, s, 2))
}

/// `w'''(t)`.
pub fn warp_d3(t: f64, problem: &RadialProblem) -> Result<f64> {
    let s = problem.t_max - t;
    problem.check(t, s)?;
    Ok(problem.warp_deriv_ts(t, s, 3))
}

/// Inverse warp `t = α (1 - (1-r)^{1/α})`.
pub fn warp_inverse(r: f64, problem: &RadialProblem) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("r = {r} outside (0, 1)")));
    }
    let a = problem.t_max;
    Ok(-a * ((-r).ln_1p() / a).exp_m1())
}

/// Schrödinger potential from its closed form.
pub fn potential_closed(t: f64, problem: &RadialProblem) -> Result<f64> {
    let s = problem.t_max - t;
    problem.check(t, s)?;
    Ok(problem.potential_at(t, s))
}

/// Schrödinger potential assembled from the warp derivatives,
/// `(3/4)(w''/w')² - w'''/(2w') + (n² - 1/4)(w'/w)²`.
pub fn potential_derivative_form(t: f64, problem: &RadialProblem) -> Result<f64> {
    let s = problem.t_max - t;
    problem.check(t, s)?;
    let w = problem.warp_ts(t, s);
    let d1 = problem.warp_deriv_ts(t, s, 1);
    let d2 = problem.warp_deriv_ts(t, s, 2);
    let d3 = problem.warp_deriv_ts(t, s, 3);
    let q = d2 / d1;
    Ok(0.75 * q * q - d3 / (2.0 * d1) + problem.centrifugal() * (d1 / w).powi(2))
}

/// Leading endpoint behaviour of `V` and the observed correction orders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialAsymptotics {
    /// `lim t² V(t)` as `t → 0+`, equal to `n² - 1/4`.
    pub coeff_origin: f64,
    /// `lim (t_max - t)² V(t)` as `t → t_max-`.
    pub coeff_boundary: f64,
    /// Stated order of `V - coeff_origin/t²` at the origin (`-1`).
    pub origin_order: f64,
    /// Stated order of `V - coeff_boundary/(t_max-t)²` at the boundary (`2γ/(1-γ)`).
    pub boundary_order: f64,
    /// `(t, t² V(t))` on a dyadic sequence toward the origin.
    pub origin_samples: Vec<(f64, f64)>,
    /// `(t_max - t, (t_max - t)² V(t))` on a dyadic sequence toward the boundary.
    pub boundary_samples: Vec<(f64, f64)>,
    /// Order from the last ratio test; `None` when the correction vanishes identically.
    pub observed_origin_order: Option<f64>,
    pub observed_boundary_order: Option<f64>,
}

impl PotentialAsymptotics {
    /// True when both observed orders are at least the stated ones, less `slack`.
    pub fn orders_consistent(&self, slack: f64) -> bool {
        let ok = |obs: Option<f64>, stated: f64| obs.is_none_or(|o| o >= stated - slack);
        ok(self.observed_origin_order, self.origin_order)
            && ok(self.observed_boundary_order, self.boundary_order)
    }
}

const ASYMPTOTIC_STEPS: i32 = 14;
// corrections smaller than this (relative to the limit) are treated as roundoff
const SIGNIFICANT: f64 = 1e-9;

/// Endpoint coefficients of `V`, with dyadic ratio tests on the corrections.
pub fn potential_asymptotics(problem: &RadialProblem) -> PotentialAsymptotics {
    let a = problem.t_max;
    let c0 = problem.centrifugal();
    let cb = problem.boundary_coefficient();
    let origin_pts: Vec<f64> = (4..4 + ASYMPTOTIC_STEPS)
        .map(|k| a * 2f64.powi(-k))
        .collect();
    let origin_samples: Vec<(f64, f64)> = origin_pts
        .iter()
        .map(|&t| (t, t * t * problem.potential_at(t, a - t)))
        .collect();
    let boundary_samples: Vec<(f64, f64)> = origin_pts
        .iter()
        .map(|&s| (s, s * s * problem.potential_at(a - s, s)))
        .collect();
    let origin_corr: Vec<(f64, f64)> = origin_samples
        .iter()
        .filter(|&&(_, v)| (v - c0).abs() > SIGNIFICANT * c0.abs().max(1.0))
        .map(|&(t, v)| (t, (v - c0) / (t * t)))
        .collect();
    let boundary_corr: Vec<(f64, f64)> = boundary_samples
        .iter()
        .filter(|&&(_, v)| (v - cb).abs() > SIGNIFICANT * cb.abs().max(1.0))
        .map(|&(s, v)| (s, (v - cb) / (s * s)))
        .collect();
    PotentialAsymptotics {
        coeff_origin: c0,
        coeff_boundary: cb,
        origin_order: -1.0,
        boundary_order: 2.0 * problem.gamma * a,
        origin_samples,
        boundary_samples,
        observed_origin_order: ratio_order(&origin_corr),
        observed_boundary_order: ratio_order(&boundary_corr),
    }
}

/// Exponent `p` of `D(x) ~ C x^p` from the last pair of a halving sequence.
fn ratio_order(samples: &[(f64, f64)]) -> Option<f64> {
    let n = samples.len();
    if n < 2 {
        return None;
    }
    let (x1, d1) = samples[n - 2];
    let (x2, d2) = samples[n - 1];
    let scale = samples.iter().map(|s| s.1.abs()).fold(0.0, f64::max);
    if scale == 0.0 || d1.abs() < 1e-300 || d2.abs() < 1e-300 || d1.signum() != d2.signum() {
        return None;
    }
    Some((d1 / d2).ln() / (x1 / x2).ln())
}

/// Carries nodal values `g` on an `r`-mesh to `h(t) = g(w(t)) √(w/w')` on the
/// nodes of `t_mesh`, with cubic Lagrange interpolation in `r`.
pub fn transport_eigenfunction(
    g: &[f64],
    r_mesh: &Mesh,
    problem: &RadialProblem,
    t_mesh: &Mesh,
) -> Result<Vec<f64>> {
    if g.len() != r_mesh.len() {
        return Err(Error::Input(format!(
            "{} values for a mesh of {} nodes",
            g.len(),
            r_mesh.len()
        )));
    }
    if r_mesh.len() < 4 {
        return Err(Error::Input("cubic interpolation needs at least 4 nodes".into()));
    }
    let (r_lo, r_hi) = r_mesh.interval();
    let (t_lo, t_hi) = t_mesh.interval();
    if t_lo < 0.0 || t_hi > problem.t_max * (1.0 + 1e-14) {
        return Err(Error::Domain(format!(
            "t-mesh [{t_lo}, {t_hi}] exceeds (0, {})",
            problem.t_max
        )));
    }
    let t_nodes = t_mesh.nodes();
    let t_from_hi = t_mesh.offsets_from_hi();
    let shift = problem.t_max - t_hi;
    let mut h = Vec::with_capacity(t_nodes.len());
    for (i, &t) in t_nodes.iter().enumerate() {
        let s = t_from_hi[i] + shift;
        let (r, sigma) = if t <= 0.0 {
            (0.0, 1.0)
        } else if s <= 0.0 {
            (1.0, 0.0)
        } else {
            (problem.warp_ts(t, s), problem.sigma_at(s))
        };
        let tol = 1e-12;
        if r < r_lo - tol || (1.0 - r_hi) > sigma + tol {
            return Err(Error::Domain(format!(
                "t = {t} maps to r = {r}, outside the r-mesh [{r_lo}, {r_hi}]"
            )));
        }
        let value = interpolate_cubic(g, r_mesh, r, sigma);
        let factor = if t <= 0.0 || s <= 0.0 {
            0.0
        } else {
            problem.transport_factor_at(t, s)
        };
        h.push(value * factor);
    }
    Ok(h)
}

/// Cubic Lagrange interpolation of nodal values at the point with coordinate
/// `r` and boundary offset `sigma = 1 - r`, using local coordinates measured
/// from whichever end keeps the most precision.
fn interpolate_cubic(g: &[f64], mesh: &Mesh, r: f64, sigma: f64) -> f64 {
    let n = mesh.len();
    let e = mesh.locate(r.clamp(mesh.nodes()[0], mesh.nodes()[n - 1]));
    let start = e.saturating_sub(1).min(n - 4);
    let (lo, hi) = mesh.interval();
    let near_hi = sigma < 0.5;
    let coord = |j: usize| {
        if near_hi {
            -(mesh.offsets_from_hi()[j] + (1.0 - hi))
        } else {
            mesh.offsets_from_lo()[j] + lo
        }
    };
    let x = if near_hi { -sigma } else { r };
    let mut acc = 0.0;
    for (j, gj) in g.iter().enumerate().skip(start).take(4) {
        let mut basis = 1.0;
        for m in start..start + 4 {
            if m != j {
                basis *= (x - coord(m)) / (coord(j) - coord(m));
            }
        }
        acc += gj * basis;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{End, Grading};
    use proptest::prelude::*;

    fn problem(gamma: f64, n: i64) -> RadialProblem {
        RadialProblem::new(gamma, n).unwrap()
    }

    #[test]
    fn gamma_zero_is_the_identity_warp() {
        let p = problem(0.0, 1);
        for t in [0.1, 0.5, 0.9] {
            assert!((warp(t, &p).unwrap() - t).abs() < 1e-15);
            assert!((warp_d1(t, &p).unwrap() - 1.0).abs() < 1e-15);
            assert_eq!(warp_d2(t, &p).unwrap(), 0.0);
        }
    }

    #[test]
    fn endpoint_values_and_domain_errors() {
        let p = problem(0.25, 0);
        let a = p.t_max();
        assert!(warp(1e-12, &p).unwrap() < 1e-11);
        assert!(1.0 - warp(a - 1e-9, &p).unwrap() < 1e-11);
        assert!(warp(0.0, &p).is_err());
        assert!(warp(a, &p).is_err());
        assert!(potential_closed(a, &p).is_err());
        assert!(RadialProblem::new(0.5, 0).is_err());
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for gamma in [0.1, 0.25, 0.4] {
            let p = problem(gamma, 0);
            let a = p.t_max();
            for frac in [0.2, 0.6, 1.0] {
                let t = frac * a * 0.9;
                let h = 1e-4;
                let f = |x: f64| warp(x, &p).unwrap();
                let fd1 = (f(t + h) - f(t - h)) / (2.0 * h);
                let fd2 = (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
                let h = 2e-4;
                let fd3 = (f(t + 2.0 * h) - 2.0 * f(t + h) + 2.0 * f(t - h) - f(t - 2.0 * h))
                    / (2.0 * h * h * h);
                assert!((fd1 - warp_d1(t, &p).unwrap()).abs() < 1e-6);
                assert!((fd2 - warp_d2(t, &p).unwrap()).abs() < 1e-6);
                let d3 = warp_d3(t, &p).unwrap();
                assert!((fd3 - d3).abs() < 1e-4 * d3.abs().max(1.0), "{fd3} {d3}");
            }
        }
    }

    #[test]
    fn potential_examples() {
        assert!((potential_closed(0.5, &problem(0.0, 0)).unwrap() + 1.0).abs() < 1e-14);
        assert!((potential_closed(0.5, &problem(0.0, 1)).unwrap() - 3.0).abs() < 1e-14);
        for n in 0..3 {
            let v = potential_derivative_form(0.3, &problem(0.0, n)).unwrap();
            let want = ((n * n) as f64 - 0.25) / 0.09;
            assert!((v - want).abs() < 1e-12 * want.abs());
        }
        let p = problem(0.25, 1);
        let d = potential_closed(0.5, &p).unwrap() - potential_derivative_form(0.5, &p).unwrap();
        assert!(d.abs() < 1e-9);
    }

    #[test]
    fn closed_and_derivative_forms_agree() {
        for gamma in [0.0, 0.1, 0.25, 0.4] {
            for n in 0..3 {
                let p = problem(gamma, n);
                let a = p.t_max();
                for i in 0..=200 {
                    let t = 0.01 + (a - 0.02) * i as f64 / 200.0;
                    let c = potential_closed(t, &p).unwrap();
                    let d = potential_derivative_form(t, &p).unwrap();
                    assert!((c - d).abs() <= 1e-9 * c.abs().max(1.0), "{gamma} {n} {t}");
                }
            }
        }
    }

    #[test]
    fn asymptotic_coefficients_and_orders() {
        let p = problem(0.25, 2);
        let asym = potential_asymptotics(&p);
        assert_eq!(asym.coeff_origin, 3.75);
        assert!((asym.coeff_boundary - 0.4375 / 2.25).abs() < 1e-15);
        for gamma in [0.0, 0.1, 0.25, 0.4] {
            for n in 0..3 {
                let asym = potential_asymptotics(&problem(gamma, n));
                assert!(asym.orders_consistent(0.05), "{gamma} {n} {asym:?}");
                let (t, v) = *asym.origin_samples.last().unwrap();
                assert!((v - asym.coeff_origin).abs() < 10.0 * t);
            }
        }
        let p = problem(0.25, 0);
        let a = p.t_max();
        let q = 2.0 * 0.25 / 0.75;
        for k in 2..=6 {
            let s = 10f64.powi(-k);
            let v = s * s * potential_closed(a - s, &p).unwrap();
            assert!((v - 0.4375 / 2.25).abs() < s.powf(q), "k={k}");
        }
    }

    #[test]
    fn boundary_limit_of_near_endpoint_potential() {
        let p = problem(0.4, 0);
        let a = p.t_max();
        let s = 1e-7;
        let c = potential_closed(a - s, &p).unwrap() * s * s;
        let d = potential_derivative_form(a - s, &p).unwrap() * s * s;
        assert!((c - p.boundary_coefficient()).abs() < 1e-6);
        assert!((d - p.boundary_coefficient()).abs() < 1e-6);
    }

    #[test]
    fn transport_of_linear_function_at_gamma_zero() {
        let p = problem(0.0, 0);
        let r_mesh = Mesh::uniform(0.0, 1.0, 64).unwrap();
        let g: Vec<f64> = r_mesh.nodes().to_vec();
        let t_mesh = Mesh::uniform(0.0, 1.0, 10).unwrap();
        let h = transport_eigenfunction(&g, &r_mesh, &p, &t_mesh).unwrap();
        for (t, hv) in t_mesh.nodes().iter().zip(&h) {
            if *t > 0.0 && *t < 1.0 {
                assert!((hv - t.powf(1.5)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn transport_rejects_uncovered_meshes() {
        let p = problem(0.25, 0);
        let r_mesh = Mesh::uniform(0.0, 0.5, 16).unwrap();
        let g = vec![1.0; r_mesh.len()];
        let t_mesh = Mesh::graded(0.0, p.t_max(), 64, Grading::GeometricRight { ratio: 0.9 }, 1e-3)
            .unwrap();
        assert!(matches!(
            transport_eigenfunction(&g, &r_mesh, &p, &t_mesh),
            Err(Error::Domain(_))
        ));
        let _ = End::Hi;
    }

    proptest! {
        #[test]
        fn warp_is_increasing_and_matches_distance(gamma in 0.0f64..0.49, x in 0.001f64..0.999, y in 0.001f64..0.999) {
            let p = problem(gamma, 0);
            let a = p.t_max();
            let (t1, t2) = if x < y { (x * a, y * a) } else { (y * a, x * a) };
            prop_assume!(t2 - t1 > 1e-9);
            prop_assert!(warp(t1, &p).unwrap() < warp(t2, &p).unwrap());
            let r = warp(t1, &p).unwrap();
            let d = crate::geometry::riem_dist_to_boundary(1.0 - r, gamma).unwrap();
            prop_assert!((d - (a - warp_inverse(r, &p).unwrap())).abs() < 1e-9);
            prop_assert!((warp_inverse(r, &p).unwrap() - t1).abs() < 1e-9);
        }
    }
}
