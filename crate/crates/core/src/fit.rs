//! Log-log least-squares fits for empirical exponents.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Result of fitting `log y = intercept + exponent · log x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub exponent: f64,
    pub intercept: f64,
    /// Standard error of the slope.
    pub stderr: f64,
    /// Coefficient of determination, clamped to `[0, 1]`.
    pub r2: f64,
    pub points_used: usize,
}

/// Ordinary least squares on `(ln x, ln y)`.
///
/// All inputs must be strictly positive and the abscissae must not repeat.
pub fn log_log_fit(xs: &[f64], ys: &[f64]) -> Result<RateFit> {
    if xs.len() != ys.len() {
        return Err(Error::Input(format!(
            "abscissa/ordinate length mismatch ({} vs {})",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "a log-log fit needs at least 3 points, got {}",
            xs.len()
        )));
    }
    if let Some(i) = xs
        .iter()
        .zip(ys)
        .position(|(x, y)| !(*x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite()))
    {
        return Err(Error::Input(format!(
            "log-log fit needs positive finite data (point {i}: x={}, y={})",
            xs[i], ys[i]
        )));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mut sorted = lx.clone();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| (w[1] - w[0]).abs() < 1e-12) {
        return Err(Error::Input("degenerate grid: repeated abscissa".into()));
    }
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let stderr = if lx.len() > 2 {
        (sse / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Ok(RateFit {
        exponent: slope,
        intercept,
        stderr,
        r2: r2.clamp(0.0, 1.0),
        points_used: lx.len(),
    })
}

/// `n` logarithmically spaced values from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| {
                    if i == n - 1 {
                        hi
                    } else {
                        (a + (b - a) * i as f64 / (n - 1) as f64).exp()
                    }
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_power_data() {
        let xs = log_space(1e-4, 1e-1, 9);
        let ys: Vec<f64> = xs.iter().map(|x| x.powf(1.5)).collect();
        let fit = log_log_fit(&xs, &ys).unwrap();
        assert!((fit.exponent - 1.5).abs() < 1e-12);
        assert!((fit.r2 - 1.0).abs() < 1e-12);
        assert!(fit.stderr < 1e-10);
    }

    #[test]
    fn rejects_repeats_and_short_input() {
        assert!(matches!(
            log_log_fit(&[1.0, 1.0, 2.0], &[1.0, 1.0, 2.0]),
            Err(Error::Input(_))
        ));
        assert!(matches!(
            log_log_fit(&[1.0, 2.0], &[1.0, 2.0]),
            Err(Error::InsufficientData(_))
        ));
        assert!(log_log_fit(&[1.0, 2.0, 3.0], &[1.0, -2.0, 3.0]).is_err());
    }

    proptest! {
        #[test]
        fn recovers_any_power_law(p in -3.0f64..3.0, c in 0.01f64..100.0) {
            let xs = log_space(1e-3, 1.0, 7);
            let ys: Vec<f64> = xs.iter().map(|x| c * x.powf(p)).collect();
            let fit = log_log_fit(&xs, &ys).unwrap();
            prop_assert!((fit.exponent - p).abs() < 1e-9);
            prop_assert!((fit.intercept - c.ln()).abs() < 1e-8);
            prop_assert!(fit.r2 >= 0.0 && fit.r2 <= 1.0);
        }
    }
}
