//! Least-squares fits used to classify growth regimes.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

fn r_squared(y: &[f64], residual_ss: f64) -> f64 {
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let total: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    if total == 0.0 {
        if residual_ss == 0.0 { 1.0 } else { 0.0 }
    } else {
        1.0 - residual_ss / total
    }
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(invalid("samples", "need at least two (x, y) pairs of equal length"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(invalid("samples", "x values are all equal"));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - slope * a - intercept).powi(2))
        .sum();
    Ok(LinearFit {
        slope,
        intercept,
        r_squared: r_squared(y, res),
    })
}

/// Fit of `ln y` against `ln x`; the slope is the local power-law exponent.
pub fn loglog_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.iter().chain(y).any(|&v| v <= 0.0) {
        return Err(invalid("samples", "log-log fit needs positive values"));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    linear_fit(&lx, &ly)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InverseFit {
    pub c: f64,
    pub r_squared: f64,
}

/// One-parameter fit `y ≈ c / x`.
pub fn inverse_fit(x: &[f64], y: &[f64]) -> Result<InverseFit> {
    if x.len() != y.len() || x.len() < 2 || x.contains(&0.0) {
        return Err(invalid("samples", "need at least two pairs with nonzero x"));
    }
    let num: f64 = x.iter().zip(y).map(|(a, b)| b / a).sum();
    let den: f64 = x.iter().map(|a| 1.0 / (a * a)).sum();
    let c = num / den;
    let res: f64 = x.iter().zip(y).map(|(a, b)| (b - c / a).powi(2)).sum();
    Ok(InverseFit {
        c,
        r_squared: r_squared(y, res),
    })
}

/// Second-order polynomial through the origin in `t²` and `t⁴`:
/// `y ≈ a·t² + b·t⁴`. Returns `(a, b)`.
pub fn quadratic_quartic_fit(t: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if t.len() != y.len() || t.len() < 2 {
        return Err(invalid("samples", "need at least two pairs"));
    }
    let (mut s4, mut s6, mut s8, mut s2y, mut s4y) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&ti, &yi) in t.iter().zip(y) {
        let t2 = ti * ti;
        let t4 = t2 * t2;
        s4 += t4;
        s6 += t2 * t4;
        s8 += t4 * t4;
        s2y += t2 * yi;
        s4y += t4 * yi;
    }
    let det = s4 * s8 - s6 * s6;
    if det == 0.0 {
        return Err(invalid("samples", "degenerate time grid"));
    }
    Ok(((s2y * s8 - s6 * s4y) / det, (s4 * s4y - s6 * s2y) / det))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v - 1.0).collect();
        let f = linear_fit(&x, &y).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-15 && (f.intercept + 1.0).abs() < 1e-15);
        assert!((f.r_squared - 1.0).abs() < 1e-15);
    }

    #[test]
    fn power_law_exponent() {
        let x = [1e-3, 2e-3, 5e-3, 1e-2];
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v * v).collect();
        assert!((loglog_fit(&x, &y).unwrap().slope - 2.0).abs() < 1e-12);
    }

    #[test]
    fn inverse_law() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v| 5.0 / v).collect();
        let f = inverse_fit(&x, &y).unwrap();
        assert!((f.c - 5.0).abs() < 1e-14 && (f.r_squared - 1.0).abs() < 1e-14);
    }

    #[test]
    fn quadratic_quartic() {
        let t: Vec<f64> = (1..=10).map(|k| k as f64 * 1e-3).collect();
        let y: Vec<f64> = t.iter().map(|v| 1.5 * v * v - 0.2 * v.powi(4)).collect();
        let (a, b) = quadratic_quartic_fit(&t, &y).unwrap();
        assert!((a - 1.5).abs() < 1e-9 && (b + 0.2).abs() < 1e-2);
    }
}
