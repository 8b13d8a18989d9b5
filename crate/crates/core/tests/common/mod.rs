//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls into the library's own eigensolver-based propagators:
//! oracles use closed forms, nalgebra's Padé exponential, a scaled Taylor
//! series, or brute-force enumeration.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::Rng;

pub type CMat = DMatrix<C64>;

pub fn random_hermitian<R: Rng>(rng: &mut R, d: usize, scale: f64) -> CMat {
    let mut m = CMat::zeros(d, d);
    for i in 0..d {
        m[(i, i)] = C64::new(rng.gen_range(-1.0..1.0) * scale, 0.0);
        for j in (i + 1)..d {
            let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale;
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

pub fn random_unit_vector<R: Rng>(rng: &mut R, d: usize) -> DVector<C64> {
    let v = DVector::from_fn(d, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let n = v.norm();
    v / C64::new(n, 0.0)
}

pub fn random_probabilities<R: Rng>(rng: &mut R, d: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..d).map(|_| rng.gen_range(0.01..1.0)).collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|v| v / s).collect()
}

/// `e^{-iHt}` from a Taylor series after scaling by `2^s`, then squaring.
pub fn taylor_propagator(h: &CMat, t: f64) -> CMat {
    let d = h.nrows();
    let a = h * C64::new(0.0, -t);
    let norm = a.iter().map(|z| z.norm()).sum::<f64>();
    let s = if norm > 0.25 { (norm / 0.25).log2().ceil() as i32 } else { 0 };
    let b = &a / C64::new(2f64.powi(s), 0.0);
    let mut out = CMat::identity(d, d);
    let mut term = CMat::identity(d, d);
    for k in 1..40 {
        term = &term * &b / C64::new(k as f64, 0.0);
        out += &term;
    }
    for _ in 0..s {
        out = &out * &out;
    }
    out
}

/// `e^{-iHt}` through nalgebra's Padé-based exponential.
pub fn pade_propagator(h: &CMat, t: f64) -> CMat {
    (h * C64::new(0.0, -t)).exp()
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Closed-form propagator of `[[0, V], [V, E]]`:
/// `e^{-iEt/2} (cos Ωt - i sin Ωt (H - E/2)/Ω)`, `Ω = √(V² + E²/4)`.
pub fn two_level_propagator(v: f64, e: f64, t: f64) -> [[C64; 2]; 2] {
    let omega = (v * v + 0.25 * e * e).sqrt();
    let phase = C64::from_polar(1.0, -0.5 * e * t);
    let (s, c) = (omega * t).sin_cos();
    let sinc = if omega == 0.0 { t } else { s / omega };
    let i = C64::new(0.0, 1.0);
    let m00 = C64::new(c, 0.0) - i * sinc * (-0.5 * e);
    let m11 = C64::new(c, 0.0) - i * sinc * (0.5 * e);
    let m01 = -i * sinc * v;
    [[phase * m00, phase * m01], [phase * m01, phase * m11]]
}

pub struct CollapseEnumeration {
    /// Probability of finding level 2 after the last step.
    pub p2: f64,
    /// Probability of the single history that stays in level 1 throughout.
    pub never_left: f64,
    pub histories: usize,
}

/// Collapse picture: after each of `n` steps the state is reset to the
/// observed level with Born probability. Every one of the `2^n` outcome
/// histories is enumerated explicitly.
pub fn collapse_enumeration(v: f64, e: f64, t_total: f64, n: u32) -> CollapseEnumeration {
    assert!(n <= 20, "enumeration is exponential in n");
    let u = two_level_propagator(v, e, t_total / n as f64);
    let jump = |from: usize, to: usize| u[to][from].norm_sqr();
    let mut p2 = 0.0;
    let mut never_left = 0.0;
    for history in 0u64..(1u64 << n) {
        let mut level = 0usize;
        let mut p = 1.0;
        for k in 0..n {
            let next = ((history >> k) & 1) as usize;
            p *= jump(level, next);
            level = next;
        }
        if level == 1 {
            p2 += p;
        }
        if history == 0 {
            never_left = p;
        }
    }
    CollapseEnumeration {
        p2,
        never_left,
        histories: 1 << n,
    }
}

/// Joint `system ⊗ momentum` propagation for the two-state pointer model.
/// Basis index `s * n_p + k` for level `s` and momentum sample `k`.
pub fn joint_space_transition(v: f64, e: f64, gamma: f64, p: &[f64], w: &[f64], t: f64) -> f64 {
    let n = p.len();
    let mut h = CMat::zeros(2 * n, 2 * n);
    for k in 0..n {
        h[(k, k)] = C64::new(gamma * p[k], 0.0);
        h[(n + k, n + k)] = C64::new(e - gamma * p[k], 0.0);
        h[(k, n + k)] = C64::new(v, 0.0);
        h[(n + k, k)] = C64::new(v, 0.0);
    }
    let mut psi = DVector::zeros(2 * n);
    for k in 0..n {
        psi[k] = C64::new(w[k].sqrt(), 0.0);
    }
    let out = pade_propagator(&h, t) * psi;
    (n..2 * n).map(|k| out[k].norm_sqr()).sum()
}

/// Adaptive Simpson quadrature.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// `P_α / t` for Gaussian `σ|V|² = A exp(-(E-E₀-Δ)²/2w²)` and Gaussian `|Φ|²`
/// of spread `s`: the convolution of two Gaussians.
pub fn gaussian_rate(amplitude: f64, offset: f64, width: f64, gamma: f64, spread: f64) -> f64 {
    let var = width * width + gamma * gamma * spread * spread;
    2.0 * std::f64::consts::PI * amplitude * width / var.sqrt() * (-offset * offset / (2.0 * var)).exp()
}

/// Real matrix exponential oracle through nalgebra.
pub fn real_expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    a.clone().exp()
}

pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}
