//! Continuous monitoring by a momentum-coupled pointer.
//!
//! Two settings share the same apparatus description, a weighted momentum grid
//! for `|Φ(p)|²`:
//!
//! * the two-state system `H = V(|1⟩⟨2|+|2⟩⟨1|) + E|2⟩⟨2| + γ p̂ (|1⟩⟨1|-|2⟩⟨2|)`.
//!   The coupling commutes with `p̂`, so every momentum sample evolves under its
//!   own 2×2 Hamiltonian with detuning shifted by `γp` and the transition
//!   probability is a weighted sum of Rabi formulas;
//! * a group of final levels `|αE⟩` with density `σ_α(E)` and couplings
//!   `|V(E)|²`, monitored with strength `γ(α)`, treated in lowest-order
//!   perturbation theory. The initial property is taken as unmonitored,
//!   `γ(α₀) = 0`.

use std::f64::consts::PI;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fit::{linear_fit, loglog_fit, LinearFit};
use crate::table::Table;

pub const DEFAULT_PROFILE_POINTS: usize = 257;
/// Change allowed when the profile resolution is doubled.
pub const RESOLUTION_TOL: f64 = 1e-6;
/// Rate formulas are trusted while `rate · t` stays below this.
pub const PERTURBATIVE_LIMIT: f64 = 0.1;
/// Below this argument `sin(y)/y` is evaluated by its series.
const SINC_SERIES_CUTOFF: f64 = 1e-6;
const MIN_FIT_SAMPLES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Shape {
    Gaussian { sigma: f64, half_width: f64 },
    Tabulated,
}

/// `|Φ(p)|²` on a momentum grid, with quadrature weights folded in.
#[derive(Debug, Clone, PartialEq)]
pub struct ApparatusProfile {
    p_grid: Vec<f64>,
    weights: Vec<f64>,
    density: Vec<f64>,
    phi0_density: f64,
    shape: Shape,
}

fn trapezoid_weights(grid: &[f64]) -> Vec<f64> {
    let n = grid.len();
    (0..n)
        .map(|i| {
            let left = if i > 0 { grid[i] - grid[i - 1] } else { 0.0 };
            let right = if i + 1 < n { grid[i + 1] - grid[i] } else { 0.0 };
            0.5 * (left + right)
        })
        .collect()
}

fn interpolate(grid: &[f64], values: &[f64], x: f64) -> f64 {
    let n = grid.len();
    if n == 0 || x < grid[0] || x > grid[n - 1] {
        return 0.0;
    }
    let idx = grid.partition_point(|&g| g <= x);
    if idx == 0 {
        return values[0];
    }
    if idx >= n {
        return values[n - 1];
    }
    let (x0, x1) = (grid[idx - 1], grid[idx]);
    let s = (x - x0) / (x1 - x0);
    values[idx - 1] * (1.0 - s) + values[idx] * s
}

fn gaussian_density(sigma: f64, p: f64) -> f64 {
    (-(p * p) / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * PI).sqrt())
}

fn check_grid(name: &'static str, grid: &[f64]) -> Result<()> {
    if grid.len() < 2 {
        return Err(invalid(name, "grid needs at least two points"));
    }
    if grid.iter().any(|v| !v.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid(name, "grid must be finite and strictly increasing"));
    }
    Ok(())
}

impl ApparatusProfile {
    /// Gaussian `|Φ(p)|²` with standard deviation `sigma`, sampled uniformly on
    /// `±8σ` with `n` points.
    pub fn gaussian(sigma: f64, n: usize) -> Result<Self> {
        Self::gaussian_with_range(sigma, n, 8.0)
    }

    pub fn gaussian_with_range(sigma: f64, n: usize, half_width_sigmas: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(invalid("sigma", "momentum spread must be positive"));
        }
        if n < 3 {
            return Err(invalid("n_p", "need at least 3 momentum points"));
        }
        let half_width = half_width_sigmas * sigma;
        let step = 2.0 * half_width / (n - 1) as f64;
        let p_grid: Vec<f64> = (0..n).map(|i| -half_width + step * i as f64).collect();
        let density: Vec<f64> = p_grid.iter().map(|&p| gaussian_density(sigma, p)).collect();
        let mut profile = Self::assemble(p_grid, density)?;
        profile.phi0_density = gaussian_density(sigma, 0.0);
        profile.shape = Shape::Gaussian { sigma, half_width };
        Ok(profile)
    }

    /// Tabulated density (any normalization); weights come from the trapezoid rule.
    pub fn from_density(p_grid: Vec<f64>, density: Vec<f64>) -> Result<Self> {
        check_grid("p_grid", &p_grid)?;
        if density.len() != p_grid.len() {
            return Err(Error::DimensionMismatch {
                expected: p_grid.len(),
                found: density.len(),
            });
        }
        if density.iter().any(|&d| d < 0.0 || !d.is_finite()) {
            return Err(Error::UnnormalizedProfile("density must be non-negative".into()));
        }
        Self::assemble(p_grid, density)
    }

    fn assemble(p_grid: Vec<f64>, density: Vec<f64>) -> Result<Self> {
        let quad = trapezoid_weights(&p_grid);
        let norm: f64 = quad.iter().zip(&density).map(|(q, d)| q * d).sum();
        if !(norm > 0.0) {
            return Err(Error::UnnormalizedProfile("density integrates to zero".into()));
        }
        let density: Vec<f64> = density.iter().map(|d| d / norm).collect();
        let weights: Vec<f64> = quad.iter().zip(&density).map(|(q, d)| q * d).collect();
        let phi0_density = interpolate(&p_grid, &density, 0.0);
        Ok(ApparatusProfile {
            p_grid,
            weights,
            density,
            phi0_density,
            shape: Shape::Tabulated,
        })
    }

    /// Explicit weights that must already sum to one.
    pub fn from_weights(p_grid: Vec<f64>, weights: Vec<f64>, phi0_density: f64) -> Result<Self> {
        check_grid("p_grid", &p_grid)?;
        if weights.len() != p_grid.len() {
            return Err(Error::DimensionMismatch {
                expected: p_grid.len(),
                found: weights.len(),
            });
        }
        if weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
            return Err(Error::UnnormalizedProfile("weights must be non-negative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::UnnormalizedProfile(format!("weights sum to {total}")));
        }
        let quad = trapezoid_weights(&p_grid);
        let density = weights
            .iter()
            .zip(&quad)
            .map(|(w, q)| if *q > 0.0 { w / q } else { 0.0 })
            .collect();
        Ok(ApparatusProfile {
            p_grid,
            weights,
            density,
            phi0_density,
            shape: Shape::Tabulated,
        })
    }

    pub fn p_grid(&self) -> &[f64] {
        &self.p_grid
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn phi0_density(&self) -> f64 {
        self.phi0_density
    }

    pub fn len(&self) -> usize {
        self.p_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p_grid.is_empty()
    }

    /// Largest grid spacing.
    pub fn max_step(&self) -> f64 {
        self.p_grid
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    /// `|Φ(p)|²` at an arbitrary momentum; zero outside the grid.
    pub fn density_at(&self, p: f64) -> f64 {
        match self.shape {
            Shape::Gaussian { sigma, half_width } => {
                if p.abs() > half_width {
                    0.0
                } else {
                    gaussian_density(sigma, p)
                }
            }
            Shape::Tabulated => interpolate(&self.p_grid, &self.density, p),
        }
    }

    /// Same profile with every grid interval halved.
    pub fn refined(&self) -> Result<Self> {
        let n = 2 * self.len() - 1;
        match self.shape {
            Shape::Gaussian { sigma, half_width } => {
                Self::gaussian_with_range(sigma, n, half_width / sigma)
            }
            Shape::Tabulated => {
                let mut grid = Vec::with_capacity(n);
                let mut dens = Vec::with_capacity(n);
                for i in 0..self.len() {
                    grid.push(self.p_grid[i]);
                    dens.push(self.density[i]);
                    if i + 1 < self.len() {
                        grid.push(0.5 * (self.p_grid[i] + self.p_grid[i + 1]));
                        dens.push(0.5 * (self.density[i] + self.density[i + 1]));
                    }
                }
                let mut refined = Self::assemble(grid, dens)?;
                refined.phi0_density = self.phi0_density;
                Ok(refined)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolutionCheck {
    pub coarse: f64,
    pub fine: f64,
    pub passed: bool,
}

/// Evaluates `f` on the profile and on its refinement; the result is trusted
/// when the two agree within [`RESOLUTION_TOL`].
pub fn resolution_check<F>(profile: &ApparatusProfile, f: F) -> Result<ResolutionCheck>
where
    F: Fn(&ApparatusProfile) -> Result<f64>,
{
    let coarse = f(profile)?;
    let fine = f(&profile.refined()?)?;
    Ok(ResolutionCheck {
        coarse,
        fine,
        passed: (coarse - fine).abs() < RESOLUTION_TOL,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoStatePointerModel {
    pub v: f64,
    pub e: f64,
    pub gamma: f64,
}

impl TwoStatePointerModel {
    pub fn new(v: f64, e: f64, gamma: f64) -> Result<Self> {
        if !(gamma >= 0.0) {
            return Err(invalid("gamma", "coupling must be >= 0"));
        }
        if !v.is_finite() || !e.is_finite() || !gamma.is_finite() {
            return Err(invalid("v", "parameters must be finite"));
        }
        Ok(TwoStatePointerModel { v, e, gamma })
    }

    /// Half the level splitting seen by momentum `p`.
    pub fn detuning(&self, p: f64) -> f64 {
        self.gamma * p - 0.5 * self.e
    }
}

/// Rabi transition probability `V²/(V²+δ²) sin²(√(V²+δ²) t)`.
pub fn rabi_transition(v: f64, detuning: f64, t: f64) -> f64 {
    let omega2 = v * v + detuning * detuning;
    if omega2 == 0.0 {
        return 0.0;
    }
    let s = (omega2.sqrt() * t).sin();
    v * v / omega2 * s * s
}

/// Probability of level 2 at time `t`, starting from `|1⟩|Φ⟩`.
pub fn two_state_transition(
    model: &TwoStatePointerModel,
    app: &ApparatusProfile,
    t: f64,
) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(invalid("t", "time must be >= 0"));
    }
    let total: f64 = app.weights.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::UnnormalizedProfile(format!("weights sum to {total}")));
    }
    Ok(app
        .p_grid
        .iter()
        .zip(&app.weights)
        .map(|(&p, &w)| w * rabi_transition(model.v, model.detuning(p), t))
        .sum())
}

/// Table `t,p2`.
pub fn two_state_time_series(
    model: &TwoStatePointerModel,
    app: &ApparatusProfile,
    times: &[f64],
) -> Result<Table> {
    let mut table = Table::new(&["t", "p2"]);
    for &t in times {
        table.push(vec![t.into(), two_state_transition(model, app, t)?.into()]);
    }
    Ok(table)
}

fn sample_window(
    model: &TwoStatePointerModel,
    app: &ApparatusProfile,
    times: &[f64],
) -> Result<Vec<f64>> {
    if times.len() < MIN_FIT_SAMPLES {
        return Err(Error::WindowTooShort(times.len(), MIN_FIT_SAMPLES));
    }
    times
        .iter()
        .map(|&t| two_state_transition(model, app, t))
        .collect()
}

/// Straight-line fit of `P₂(t)` over the sample times.
pub fn two_state_rate_regime(
    model: &TwoStatePointerModel,
    app: &ApparatusProfile,
    times: &[f64],
) -> Result<LinearFit> {
    let p = sample_window(model, app, times)?;
    linear_fit(times, &p)
}

/// Power-law exponent of `P₂(t)` over the sample times (2 for quadratic onset).
pub fn two_state_onset_exponent(
    model: &TwoStatePointerModel,
    app: &ApparatusProfile,
    times: &[f64],
) -> Result<LinearFit> {
    let p = sample_window(model, app, times)?;
    loglog_fit(times, &p)
}

/// Group of final levels reached from `|α₀E₀⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelStructure {
    #[serde(rename = "E")]
    pub energy_grid: Vec<f64>,
    #[serde(rename = "sigma")]
    pub level_density: Vec<f64>,
    #[serde(rename = "v_sq")]
    pub coupling_sq: Vec<f64>,
    #[serde(rename = "gamma")]
    pub gamma_alpha: f64,
    #[serde(rename = "E0")]
    pub e0: f64,
}

impl LevelStructure {
    pub fn new(
        energy_grid: Vec<f64>,
        level_density: Vec<f64>,
        coupling_sq: Vec<f64>,
        gamma_alpha: f64,
        e0: f64,
    ) -> Result<Self> {
        let ls = LevelStructure {
            energy_grid,
            level_density,
            coupling_sq,
            gamma_alpha,
            e0,
        };
        ls.validate()?;
        Ok(ls)
    }

    /// Builds the level structure from functions sampled on a uniform grid.
    pub fn sampled<S, V>(
        e_min: f64,
        e_max: f64,
        n: usize,
        sigma: S,
        v_sq: V,
        gamma_alpha: f64,
        e0: f64,
    ) -> Result<Self>
    where
        S: Fn(f64) -> f64,
        V: Fn(f64) -> f64,
    {
        if n < 2 || !(e_max > e_min) {
            return Err(invalid("E", "need n >= 2 and e_max > e_min"));
        }
        let step = (e_max - e_min) / (n - 1) as f64;
        let grid: Vec<f64> = (0..n).map(|i| e_min + step * i as f64).collect();
        let dens = grid.iter().map(|&e| sigma(e)).collect();
        let coup = grid.iter().map(|&e| v_sq(e)).collect();
        Self::new(grid, dens, coup, gamma_alpha, e0)
    }

    pub fn validate(&self) -> Result<()> {
        check_grid("E", &self.energy_grid)?;
        let n = self.energy_grid.len();
        for (name, arr) in [("sigma", &self.level_density), ("v_sq", &self.coupling_sq)] {
            if arr.len() != n {
                return Err(invalid(name, format!("expected {n} samples, got {}", arr.len())));
            }
            if arr.iter().any(|&v| v < 0.0 || !v.is_finite()) {
                return Err(invalid(name, "values must be finite and >= 0"));
            }
        }
        if !(self.gamma_alpha >= 0.0 && self.gamma_alpha.is_finite()) {
            return Err(invalid("gamma", "coupling must be finite and >= 0"));
        }
        if !self.e0.is_finite() {
            return Err(invalid("E0", "must be finite"));
        }
        Ok(())
    }

    pub fn from_json_str(text: &str) -> std::result::Result<Self, String> {
        let ls: LevelStructure = serde_json::from_str(text).map_err(|e| e.to_string())?;
        ls.validate().map_err(|e| e.to_string())?;
        Ok(ls)
    }

    pub fn from_file(path: &Path) -> std::result::Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::from_json_str(&text)
    }

    pub fn with_gamma(&self, gamma: f64) -> Self {
        LevelStructure {
            gamma_alpha: gamma,
            ..self.clone()
        }
    }

    pub fn coupling_sq_at(&self, e: f64) -> f64 {
        interpolate(&self.energy_grid, &self.coupling_sq, e)
    }

    pub fn level_density_at(&self, e: f64) -> f64 {
        interpolate(&self.energy_grid, &self.level_density, e)
    }

    /// `σ(E)|V(E)|²`, linear between nodes of the product, zero off the grid.
    pub fn rate_density_at(&self, e: f64) -> f64 {
        let n = self.energy_grid.len();
        if e < self.energy_grid[0] || e > self.energy_grid[n - 1] {
            return 0.0;
        }
        let idx = self.energy_grid.partition_point(|&g| g <= e).clamp(1, n - 1);
        let (x0, x1) = (self.energy_grid[idx - 1], self.energy_grid[idx]);
        let s = (e - x0) / (x1 - x0);
        let f0 = self.level_density[idx - 1] * self.coupling_sq[idx - 1];
        let f1 = self.level_density[idx] * self.coupling_sq[idx];
        f0 * (1.0 - s) + f1 * s
    }

    fn min_step(&self) -> f64 {
        self.energy_grid
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// `∫ dE σ|V|²` by the trapezoid rule.
    pub fn integrated_rate_density(&self) -> f64 {
        let quad = trapezoid_weights(&self.energy_grid);
        quad.iter()
            .zip(self.level_density.iter().zip(&self.coupling_sq))
            .map(|(q, (s, v))| q * s * v)
            .sum()
    }
}

/// `sin²(x t/2) / x²`, continuous through `x = 0` where it equals `t²/4`.
pub fn resonance_factor(x: f64, t: f64) -> f64 {
    let y = 0.5 * x * t;
    let sinc = if y.abs() < SINC_SERIES_CUTOFF {
        1.0 - y * y / 6.0
    } else {
        y.sin() / y
    };
    0.25 * t * t * sinc * sinc
}

/// Lowest-order probability density of reaching `|αE⟩`:
/// `4 ∫ dp |V|² |Φ(p)|² sin²((E-E₀+γp)t/2) / (E-E₀+γp)²`.
pub fn transition_probability_alpha_e(
    ls: &LevelStructure,
    app: &ApparatusProfile,
    e: f64,
    t: f64,
) -> f64 {
    let v_sq = ls.coupling_sq_at(e);
    let detuning = e - ls.e0;
    let sum: f64 = app
        .p_grid
        .iter()
        .zip(&app.weights)
        .map(|(&p, &w)| w * resonance_factor(detuning + ls.gamma_alpha * p, t))
        .sum();
    4.0 * v_sq * sum
}

/// Probability summed over the group:
/// `2πt ∫ dE σ(E)|V(E)|² / γ · |Φ((E-E₀)/γ)|²`.
///
/// The integral is evaluated over whichever grid resolves the integrand: on
/// the momentum grid (substituting `E = E₀ + γp`) while `γ Δp` is no coarser
/// than the energy grid, otherwise directly over the energy grid.
pub fn transition_probability_alpha(
    ls: &LevelStructure,
    app: &ApparatusProfile,
    t: f64,
) -> Result<f64> {
    let gamma = ls.gamma_alpha;
    if gamma == 0.0 {
        return Err(Error::ZeroGamma);
    }
    if !(t >= 0.0) {
        return Err(invalid("t", "time must be >= 0"));
    }
    let integral = if gamma * app.max_step() <= ls.min_step() {
        app.p_grid
            .iter()
            .zip(&app.weights)
            .map(|(&p, &w)| w * ls.rate_density_at(ls.e0 + gamma * p))
            .sum::<f64>()
    } else {
        let quad = trapezoid_weights(&ls.energy_grid);
        ls.energy_grid
            .iter()
            .zip(&quad)
            .enumerate()
            .map(|(i, (&e, &q))| {
                let f = ls.level_density[i] * ls.coupling_sq[i];
                q * f * app.density_at((e - ls.e0) / gamma) / gamma
            })
            .sum::<f64>()
    };
    Ok(2.0 * PI * t * integral)
}

/// Golden-rule rate `2π σ(E₀)|V(E₀)|²`.
pub fn golden_rule_rate(ls: &LevelStructure) -> f64 {
    2.0 * PI * ls.level_density_at(ls.e0) * ls.coupling_sq_at(ls.e0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimePoint {
    pub gamma: f64,
    pub p_alpha: f64,
    /// Set when `p_alpha` exceeds the perturbative limit.
    pub advisory: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeScan {
    pub t: f64,
    pub golden_rule_probability: f64,
    pub points: Vec<RegimePoint>,
}

impl RegimeScan {
    pub fn gammas(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.gamma).collect()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.p_alpha).collect()
    }

    /// Columns `gamma,p_alpha`.
    pub fn to_table(&self) -> Table {
        let mut table = Table::new(&["gamma", "p_alpha"]);
        for p in &self.points {
            table.push(vec![p.gamma.into(), p.p_alpha.into()]);
        }
        table
    }
}

/// `P_α(γ)` over a range of pointer couplings. Samples are independent and
/// may be evaluated concurrently; the result is the same either way.
pub fn regime_scan(
    ls: &LevelStructure,
    app: &ApparatusProfile,
    gammas: &[f64],
    t: f64,
    parallel: bool,
) -> Result<RegimeScan> {
    if gammas.iter().any(|&g| !(g > 0.0)) {
        return Err(invalid("gamma", "scan values must be positive"));
    }
    if gammas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("gamma", "scan values must be increasing"));
    }
    let eval = |&g: &f64| -> Result<RegimePoint> {
        let p = transition_probability_alpha(&ls.with_gamma(g), app, t)?;
        Ok(RegimePoint {
            gamma: g,
            p_alpha: p,
            advisory: p > PERTURBATIVE_LIMIT,
        })
    };
    let points = if parallel {
        gammas.par_iter().map(eval).collect::<Result<Vec<_>>>()?
    } else {
        gammas.iter().map(eval).collect::<Result<Vec<_>>>()?
    };
    Ok(RegimeScan {
        t,
        golden_rule_probability: golden_rule_rate(ls) * t,
        points,
    })
}

/// Log-spaced values from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}
