//! Quadrature primitives: Gauss-Legendre rules, adaptive Gauss-Kronrod, and
//! closed-form moments of first-order hat functions against power weights.
//!
//! Hat-function moments are the workhorse of every assembly routine. For an
//! element `[a, b]` the two hats are `(b - x)/(b - a)` and `(x - a)/(b - a)`;
//! [`PowerSum::hat_moments`] returns `[∫ w φ_a², ∫ w φ_a φ_b, ∫ w φ_b²]`.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Builds the `n`-point rule by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// Mapped nodes and weights on `[a, b]`.
    pub fn points(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, w * half))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let dp = if n == 0 {
        0.0
    } else {
        n as f64 * (x * p1 - p0) / (x * x - 1.0)
    };
    (p, dp)
}

/// Shared 12-point rule used for element integrals of smooth weights.
pub fn gauss12() -> &'static GaussRule {
    static RULE: OnceLock<GaussRule> = OnceLock::new();
    RULE.get_or_init(|| GaussRule::new(12))
}

/// Shared 8-point rule used for sub-element integrals of piecewise-smooth integrands.
pub fn gauss8() -> &'static GaussRule {
    static RULE: OnceLock<GaussRule> = OnceLock::new();
    RULE.get_or_init(|| GaussRule::new(8))
}

// Kronrod 15-point extension of the 7-point Gauss rule (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(mid - dx) + f(mid + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Adaptive Gauss-Kronrod (7/15) integration to relative tolerance `rel_tol`.
pub fn adaptive_gk<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    const MAX_INTERVALS: usize = 4000;
    let (v, e) = kronrod15(&f, a, b);
    let mut intervals = vec![(a, b, v, e)];
    for _ in 0..MAX_INTERVALS {
        let total: f64 = intervals.iter().map(|iv| iv.2).sum();
        let err: f64 = intervals.iter().map(|iv| iv.3).sum();
        if err <= rel_tol * total.abs() || err < 1e-300 {
            return Ok(total);
        }
        let (idx, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("nonempty interval list");
        let (lo, hi, _, _) = intervals.swap_remove(idx);
        let m = 0.5 * (lo + hi);
        let (v1, e1) = kronrod15(&f, lo, m);
        let (v2, e2) = kronrod15(&f, m, hi);
        intervals.push((lo, m, v1, e1));
        intervals.push((m, hi, v2, e2));
    }
    Err(Error::Numerical(format!(
        "adaptive quadrature did not reach relative tolerance {rel_tol:e} on [{a}, {b}]"
    )))
}

/// Direction of the distance coordinate `s` measured from a weight's singular point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `s = x - origin`
    Right,
    /// `s = origin - x`
    Left,
}

/// Weight `w(x) = Σ c_k s^{p_k}` with `s` the distance from `origin` along `side`.
#[derive(Debug, Clone)]
pub struct PowerSum {
    pub origin: f64,
    pub side: Side,
    pub terms: Vec<(f64, f64)>,
}

impl PowerSum {
    pub fn new(origin: f64, side: Side, terms: Vec<(f64, f64)>) -> Self {
        Self {
            origin,
            side,
            terms,
        }
    }

    pub fn monomial(origin: f64, side: Side, coeff: f64, power: f64) -> Self {
        Self::new(origin, side, vec![(coeff, power)])
    }

    pub fn eval(&self, x: f64) -> f64 {
        let s = self.distance(x);
        self.terms.iter().map(|&(c, p)| c * s.powf(p)).sum()
    }

    fn distance(&self, x: f64) -> f64 {
        match self.side {
            Side::Right => x - self.origin,
            Side::Left => self.origin - x,
        }
    }

    /// `[∫ w φ_a², ∫ w φ_a φ_b, ∫ w φ_b²]` over `[a, b]`.
    ///
    /// Entries whose integral diverges (a hat that is nonzero at a
    /// non-integrable singularity) come back as `+inf`.
    pub fn hat_moments(&self, a: f64, b: f64) -> [f64; 3] {
        let (s_a, s_b) = (self.distance(a), self.distance(b));
        let (s0, s1) = if s_a <= s_b { (s_a, s_b) } else { (s_b, s_a) };
        let mut m = [0.0; 3];
        for &(c, p) in &self.terms {
            let u = distance_hat_moments(s0, s1, p);
            for k in 0..3 {
                m[k] += c * u[k];
            }
        }
        if s_a <= s_b {
            m
        } else {
            [m[2], m[1], m[0]]
        }
    }

    /// `∫ w ℓ₁ ℓ₂` over `[a, b]` for linear functions given by endpoint values.
    pub fn linear_product(&self, a: f64, b: f64, l1: (f64, f64), l2: (f64, f64)) -> f64 {
        let m = self.hat_moments(a, b);
        l1.0 * l2.0 * m[0] + (l1.0 * l2.1 + l1.1 * l2.0) * m[1] + l1.1 * l2.1 * m[2]
    }
}

/// Moments of `s^p` against the hats of `[s0, s1]`, ordered `[φ_{s0}², φ_{s0}φ_{s1}, φ_{s1}²]`.
pub fn distance_hat_moments(s0: f64, s1: f64, p: f64) -> [f64; 3] {
    debug_assert!(s0 >= 0.0 && s1 > s0);
    if s0 == 0.0 {
        let scale = s1.powf(p + 1.0);
        let near = if p > -1.0 {
            2.0 * scale / ((p + 1.0) * (p + 2.0) * (p + 3.0))
        } else {
            f64::INFINITY
        };
        let mixed = if p > -2.0 {
            scale / ((p + 2.0) * (p + 3.0))
        } else {
            f64::INFINITY
        };
        let far = if p > -3.0 {
            scale / (p + 3.0)
        } else {
            f64::INFINITY
        };
        return [near, mixed, far];
    }
    let scale = s0.powf(p + 1.0);
    let u = unit_hat_moments(p, s1 / s0);
    [scale * u[0], scale * u[1], scale * u[2]]
}

/// Hat moments of `u^p` on `[1, r]`.
///
/// Thin elements go through Gauss-Legendre (the weight is analytic there with
/// its singularity at distance ≥ 2 half-widths); wide elements use the exact
/// antiderivatives, where cancellation is mild.
pub fn unit_hat_moments(p: f64, r: f64) -> [f64; 3] {
    let len = r - 1.0;
    if r <= 1.5 {
        let rule = gauss12();
        let mut m = [0.0; 3];
        for (u, w) in rule.points(1.0, r) {
            let wt = w * u.powf(p);
            let left = (r - u) / len;
            let right = (u - 1.0) / len;
            m[0] += wt * left * left;
            m[1] += wt * left * right;
            m[2] += wt * right * right;
        }
        return m;
    }
    let ln_r = r.ln();
    let moment = |q: f64| {
        let e = q + 1.0;
        if e.abs() < 1e-14 {
            ln_r
        } else {
            (e * ln_r).exp_m1() / e
        }
    };
    let (m0, m1, m2) = (moment(p), moment(p + 1.0), moment(p + 2.0));
    let l2 = len * len;
    [
        (r * r * m0 - 2.0 * r * m1 + m2) / l2,
        (-r * m0 + (1.0 + r) * m1 - m2) / l2,
        (m0 - 2.0 * m1 + m2) / l2,
    ]
}

/// `[∫ f φ_a², ∫ f φ_a φ_b, ∫ f φ_b²]` for a smooth weight by the 12-point rule.
pub fn gauss_hat_moments<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> [f64; 3] {
    let len = b - a;
    let mut m = [0.0; 3];
    for (x, w) in gauss12().points(a, b) {
        let wt = w * f(x);
        let left = (b - x) / len;
        let right = (x - a) / len;
        m[0] += wt * left * left;
        m[1] += wt * left * right;
        m[2] += wt * right * right;
    }
    m
}
