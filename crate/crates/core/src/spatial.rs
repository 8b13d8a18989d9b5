//! Position-space decoherence.
//!
//! Two halves: physical calculators for localization rates and decoherence
//! timescales (any consistent unit system, SI for the macroscopic ratio), and a
//! grid integrator for
//!
//! `∂ρ/∂t = -i/(2m) (∂²_{x'} - ∂²_x) ρ - Λ (x-x')² ρ + (γ/2)(x-x')(∂_{x'} - ∂_x) ρ`
//!
//! in units with ħ = 1. The state is `ρ(x_i, x_j)` on a periodic grid
//! `x_i = -L/2 + iΔx` normalized so that `Σ ρ_ii Δx = 1`.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::qstate::{CMatrix, C64, ZERO};
use crate::table::Table;

/// Reduced Planck constant, J·s.
pub const HBAR_SI: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
pub const K_B_SI: f64 = 1.380_649e-23;

pub const MIN_GRID_POINTS: usize = 16;
/// Fraction of the RK4 stability radius used by [`max_stable_dt`].
pub const STABILITY_SAFETY: f64 = 0.9;
const RK4_STABILITY_RADIUS: f64 = 2.78;
const BLOWUP_FACTOR: f64 = 10.0;
const HERMITICITY_TOL: f64 = 1e-8;

// 4th-order periodic stencils for offsets -2..=2.
const SECOND_DIFF: [f64; 5] = [-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0];
const FIRST_DIFF: [f64; 5] = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];

// ---------------------------------------------------------------------------
// Scattering environments

/// Scattered particles: wavenumber, flux `N v / V` and effective cross-section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentSpec {
    pub k: f64,
    pub flux: f64,
    pub sigma_eff: f64,
}

impl EnvironmentSpec {
    pub fn new(k: f64, flux: f64, sigma_eff: f64) -> Result<Self> {
        for (name, v) in [("k", k), ("flux", flux), ("sigma_eff", sigma_eff)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(name, "must be finite and >= 0"));
            }
        }
        Ok(EnvironmentSpec { k, flux, sigma_eff })
    }
}

/// `Λ = k² · flux · σ_eff`.
pub fn localization_rate(env: &EnvironmentSpec) -> f64 {
    env.k * env.k * env.flux * env.sigma_eff
}

/// Cross-section of a sphere of radius `a` for wavenumber `k`: geometric when
/// `ka ≥ 1`, falling off as `(ka)⁴` for long wavelengths.
pub fn effective_cross_section(radius: f64, k: f64) -> f64 {
    let ka = k * radius;
    std::f64::consts::PI * radius * radius * (8.0 / 3.0 * ka.powi(4)).min(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeparationRegime {
    /// `k Δx < 1`: many scatterings are needed, `t ≈ 1/(Λ Δx²)`.
    Small,
    /// `k Δx ≥ 1`: one scattering resolves the separation, `t ≈ k²/Λ`.
    SingleScattering,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecoherenceTimescales {
    pub t_small: f64,
    pub t_single: f64,
    pub regime: SeparationRegime,
}

impl DecoherenceTimescales {
    pub fn applicable(&self) -> f64 {
        match self.regime {
            SeparationRegime::Small => self.t_small,
            SeparationRegime::SingleScattering => self.t_single,
        }
    }
}

pub fn decoherence_timescales(env: &EnvironmentSpec, dx: f64) -> Result<DecoherenceTimescales> {
    if !(dx > 0.0) {
        return Err(invalid("dx", "separation must be positive"));
    }
    let lambda = localization_rate(env);
    let regime = if env.k * dx < 1.0 {
        SeparationRegime::Small
    } else {
        SeparationRegime::SingleScattering
    };
    Ok(DecoherenceTimescales {
        t_small: 1.0 / (lambda * dx * dx),
        t_single: env.k * env.k / lambda,
        regime,
    })
}

/// Named scattering source from the environments file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentSource {
    pub name: String,
    #[serde(default)]
    pub label: String,
    pub k: f64,
    pub flux: f64,
    #[serde(default)]
    pub derivation: String,
}

impl EnvironmentSource {
    /// Environment seen by a sphere of the given radius.
    pub fn for_radius(&self, radius: f64) -> Result<EnvironmentSpec> {
        EnvironmentSpec::new(self.k, self.flux, effective_cross_section(radius, self.k))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentCatalog {
    #[serde(default)]
    pub units: String,
    #[serde(default)]
    pub cross_section: String,
    pub sizes_cm: Vec<f64>,
    pub environments: Vec<EnvironmentSource>,
}

/// The catalog shipped in `data/environments.json`.
pub const BUILTIN_ENVIRONMENTS: &str = include_str!("../../../data/environments.json");

impl EnvironmentCatalog {
    pub fn builtin() -> Self {
        Self::from_json_str(BUILTIN_ENVIRONMENTS).expect("bundled environments file is valid")
    }

    pub fn from_json_str(text: &str) -> std::result::Result<Self, String> {
        let cat: EnvironmentCatalog = serde_json::from_str(text).map_err(|e| e.to_string())?;
        if cat.sizes_cm.is_empty() || cat.sizes_cm.iter().any(|&a| !(a > 0.0)) {
            return Err("sizes_cm must be a non-empty list of positive sizes".into());
        }
        for src in &cat.environments {
            EnvironmentSpec::new(src.k, src.flux, 0.0)
                .map_err(|e| format!("environment `{}`: {e}", src.name))?;
        }
        Ok(cat)
    }

    pub fn from_file(path: &Path) -> std::result::Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::from_json_str(&text)
    }

    /// One row per (environment, size): `environment,size_cm,lambda,log10_lambda`.
    pub fn localization_table(&self) -> Result<Table> {
        let mut table = Table::new(&["environment", "size_cm", "lambda", "log10_lambda"]);
        for src in &self.environments {
            for &a in &self.sizes_cm {
                let lambda = localization_rate(&src.for_radius(a)?);
                table.push(vec![
                    src.name.clone().into(),
                    a.into(),
                    lambda.into(),
                    lambda.log10().into(),
                ]);
            }
        }
        Ok(table)
    }
}

// ---------------------------------------------------------------------------
// Macroscopic estimate

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MacroscopicBody {
    pub mass_si: f64,
    pub temperature: f64,
    pub delta_x: f64,
}

impl MacroscopicBody {
    pub fn new(mass_si: f64, temperature: f64, delta_x: f64) -> Result<Self> {
        for (name, v) in [("mass", mass_si), ("temperature", temperature), ("delta_x", delta_x)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, "must be positive"));
            }
        }
        Ok(MacroscopicBody {
            mass_si,
            temperature,
            delta_x,
        })
    }

    /// `λ_th = ħ / √(m k_B T)`.
    pub fn thermal_wavelength(&self) -> f64 {
        HBAR_SI / (self.mass_si * K_B_SI * self.temperature).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub ratio: f64,
    pub thermal_wavelength: f64,
}

/// Decoherence rate over relaxation rate, `m k_B T Δx² / ħ² = (Δx/λ_th)²`.
pub fn decoherence_relaxation_ratio(body: &MacroscopicBody) -> RatioReport {
    let ratio = body.mass_si * K_B_SI * body.temperature * body.delta_x * body.delta_x
        / (HBAR_SI * HBAR_SI);
    RatioReport {
        ratio,
        thermal_wavelength: body.thermal_wavelength(),
    }
}

// ---------------------------------------------------------------------------
// Grid master equation

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MasterEquationSpec {
    pub lambda: f64,
    pub gamma_friction: f64,
    pub include_kinetic: bool,
}

impl MasterEquationSpec {
    pub fn new(lambda: f64, gamma_friction: f64, include_kinetic: bool) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(invalid("lambda", "must be finite and >= 0"));
        }
        if !(gamma_friction >= 0.0 && gamma_friction.is_finite()) {
            return Err(invalid("gamma", "must be finite and >= 0"));
        }
        Ok(MasterEquationSpec {
            lambda,
            gamma_friction,
            include_kinetic,
        })
    }

    /// Quantum Brownian motion at temperature `t` (k_B = 1): `Λ = m γ T`.
    pub fn thermal(mass: f64, gamma: f64, temperature: f64) -> Result<Self> {
        if !(temperature >= 0.0) {
            return Err(invalid("temperature", "must be >= 0"));
        }
        Self::new(mass * gamma * temperature, gamma, true)
    }
}

/// `ρ(x_i, x_j)`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    n: usize,
    length: f64,
    mass: f64,
    rho: Vec<C64>,
}

fn check_geometry(n: usize, length: f64, mass: f64) -> Result<()> {
    if n < MIN_GRID_POINTS {
        return Err(invalid("n", format!("need at least {MIN_GRID_POINTS} grid points")));
    }
    if !(length > 0.0 && length.is_finite()) {
        return Err(invalid("length", "box size must be positive"));
    }
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(invalid("mass", "must be positive"));
    }
    Ok(())
}

impl GridState {
    /// Validates Hermiticity (1e-10) and trace (1e-8).
    pub fn new(n: usize, length: f64, mass: f64, rho: &CMatrix) -> Result<Self> {
        check_geometry(n, length, mass)?;
        if rho.nrows() != n || rho.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: rho.nrows(),
            });
        }
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(rho[(i, j)]);
            }
        }
        let gs = GridState {
            n,
            length,
            mass,
            rho: data,
        };
        if gs.rho.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite entries".into()));
        }
        let asym = gs.max_asymmetry();
        if asym > 1e-10 {
            return Err(Error::NonHermitianInput(asym));
        }
        let tr = gs.trace();
        if (tr - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        Ok(gs)
    }

    /// Pure state built from a wavefunction sampled on the grid, renormalized.
    pub fn from_wavefunction(length: f64, mass: f64, psi: &[C64]) -> Result<Self> {
        let n = psi.len();
        check_geometry(n, length, mass)?;
        let dx = length / n as f64;
        let norm = (psi.iter().map(|z| z.norm_sqr()).sum::<f64>() * dx).sqrt();
        if !(norm > 0.0) {
            return Err(Error::InvalidState("wavefunction vanishes on the grid".into()));
        }
        let psi: Vec<C64> = psi.iter().map(|z| z / norm).collect();
        let mut rho = Vec::with_capacity(n * n);
        for a in &psi {
            for b in &psi {
                rho.push(a * b.conj());
            }
        }
        Ok(GridState {
            n,
            length,
            mass,
            rho,
        })
    }

    /// Gaussian packet `exp(-(x-x0)²/(4σ²) + i p0 x)`.
    pub fn gaussian(n: usize, length: f64, mass: f64, x0: f64, sigma: f64, p0: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(invalid("sigma", "packet width must be positive"));
        }
        let dx = length / n as f64;
        let psi: Vec<C64> = (0..n)
            .map(|i| {
                let x = -0.5 * length + dx * i as f64;
                let amp = (-(x - x0).powi(2) / (4.0 * sigma * sigma)).exp();
                C64::from_polar(amp, p0 * x)
            })
            .collect();
        Self::from_wavefunction(length, mass, &psi)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        -0.5 * self.length + self.dx() * i as f64
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.rho[i * self.n + j]
    }

    pub fn entries(&self) -> &[C64] {
        &self.rho
    }

    pub fn to_matrix(&self) -> CMatrix {
        CMatrix::from_row_slice(self.n, self.n, &self.rho)
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i).re).sum::<f64>() * self.dx()
    }

    /// `Tr ρ²` in the continuum normalization.
    pub fn purity(&self) -> f64 {
        let dx = self.dx();
        self.rho.iter().map(|z| z.norm_sqr()).sum::<f64>() * dx * dx
    }

    pub fn max_asymmetry(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.rho.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Columns `x,xp,re,im`, one row per matrix entry.
    pub fn snapshot_table(&self) -> Table {
        let mut table = Table::new(&["x", "xp", "re", "im"]);
        for i in 0..self.n {
            for j in 0..self.n {
                let z = self.get(i, j);
                table.push(vec![self.x(i).into(), self.x(j).into(), z.re.into(), z.im.into()]);
            }
        }
        table
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub x_mean: f64,
    pub p_mean: f64,
    pub x2: f64,
    pub p2: f64,
}

/// `⟨x⟩, ⟨p⟩, ⟨x²⟩, ⟨p²⟩`. Momentum moments use the same 4th-order
/// central differences as the integrator, applied at `x' = x`.
pub fn moments(gs: &GridState) -> Moments {
    let n = gs.n;
    let dx = gs.dx();
    let (mut x_mean, mut x2, mut p_mean, mut p2) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        let d = gs.get(i, i).re;
        let x = gs.x(i);
        x_mean += x * d;
        x2 += x * x * d;
        let (mut first, mut second) = (ZERO, ZERO);
        for (o, (c1, c2)) in FIRST_DIFF.iter().zip(&SECOND_DIFF).enumerate() {
            let k = (i + n + o - 2) % n;
            let z = gs.get(k, i);
            first += z * *c1;
            second += z * *c2;
        }
        // -i ∂ acting on the row index, then the trace.
        p_mean += first.im;
        p2 -= second.re;
    }
    Moments {
        x_mean: x_mean * dx,
        p_mean,
        x2: x2 * dx,
        p2: p2 / dx,
    }
}

/// Largest RK4 step the explicit scheme tolerates for this grid and generator.
pub fn max_stable_dt(gs: &GridState, spec: &MasterEquationSpec) -> f64 {
    let dx = gs.dx();
    let span = gs.length - dx;
    let mut radius = spec.lambda * span * span;
    if spec.include_kinetic {
        // Largest eigenvalue of the discrete kinetic operator.
        radius += 8.0 / (3.0 * gs.mass * dx * dx);
    }
    // Friction: |x-x'| times twice the largest first-difference symbol.
    radius += spec.gamma_friction * span * 1.3723 / dx;
    if radius == 0.0 {
        f64::INFINITY
    } else {
        STABILITY_SAFETY * RK4_STABILITY_RADIUS / radius
    }
}

struct Generator {
    n: usize,
    dx: f64,
    kinetic: f64,
    lambda: f64,
    half_gamma: f64,
    second: [f64; 5],
    first: [f64; 5],
}

impl Generator {
    fn new(gs: &GridState, spec: &MasterEquationSpec) -> Self {
        let dx = gs.dx();
        Generator {
            n: gs.n,
            dx,
            kinetic: if spec.include_kinetic { 1.0 / (2.0 * gs.mass) } else { 0.0 },
            lambda: spec.lambda,
            half_gamma: 0.5 * spec.gamma_friction,
            second: SECOND_DIFF.map(|c| c / (dx * dx)),
            first: FIRST_DIFF.map(|c| c / dx),
        }
    }

    fn row(&self, rho: &[C64], i: usize, out: &mut [C64]) {
        let n = self.n;
        let rows: [usize; 5] = std::array::from_fn(|o| (i + n + o - 2) % n);
        let own = &rho[i * n..(i + 1) * n];
        for (j, slot) in out.iter_mut().enumerate() {
            let d = (i as f64 - j as f64) * self.dx;
            let mut acc = -self.lambda * d * d * own[j];
            if self.kinetic != 0.0 || self.half_gamma != 0.0 {
                let (mut lap_r, mut lap_c, mut der_r, mut der_c) = (ZERO, ZERO, ZERO, ZERO);
                for o in 0..5 {
                    let zr = rho[rows[o] * n + j];
                    let zc = own[(j + n + o - 2) % n];
                    lap_r += zr * self.second[o];
                    lap_c += zc * self.second[o];
                    der_r += zr * self.first[o];
                    der_c += zc * self.first[o];
                }
                let kin = (lap_c - lap_r) * self.kinetic;
                acc += C64::new(kin.im, -kin.re);
                acc += (der_c - der_r) * (self.half_gamma * d);
            }
            *slot = acc;
        }
    }

    fn apply(&self, rho: &[C64], out: &mut [C64], parallel: bool) {
        let n = self.n;
        if parallel {
            out.par_chunks_mut(n)
                .enumerate()
                .for_each(|(i, row)| self.row(rho, i, row));
        } else {
            out.chunks_mut(n)
                .enumerate()
                .for_each(|(i, row)| self.row(rho, i, row));
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub parallel: bool,
    /// Record moments every this many steps (0 = only start and end).
    pub record_every: usize,
    /// Reject steps above [`max_stable_dt`]. When off, divergence is still
    /// caught and reported as `UnstableStep`.
    pub enforce_bound: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            parallel: true,
            record_every: 0,
            enforce_bound: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentRecord {
    pub t: f64,
    pub moments: Moments,
    pub trace: f64,
    pub purity: f64,
}

impl MomentRecord {
    fn of(gs: &GridState, t: f64) -> Self {
        MomentRecord {
            t,
            moments: moments(gs),
            trace: gs.trace(),
            purity: gs.purity(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub state: GridState,
    pub records: Vec<MomentRecord>,
    pub steps: usize,
    pub dt: f64,
}

impl Trajectory {
    /// Columns `t,x_mean,p_mean,x2,p2,trace,purity`.
    pub fn to_table(&self) -> Table {
        let mut table = Table::new(&["t", "x_mean", "p_mean", "x2", "p2", "trace", "purity"]);
        for r in &self.records {
            table.push(vec![
                r.t.into(),
                r.moments.x_mean.into(),
                r.moments.p_mean.into(),
                r.moments.x2.into(),
                r.moments.p2.into(),
                r.trace.into(),
                r.purity.into(),
            ]);
        }
        table
    }
}

/// Evolves to time `t` with steps no longer than `dt`.
pub fn evolve_master(gs: &GridState, spec: &MasterEquationSpec, t: f64, dt: f64) -> Result<GridState> {
    Ok(evolve_master_with(gs, spec, t, dt, &EvolveOptions::default())?.state)
}

/// Fixed-step RK4. The step count is `ceil(t/dt)` and the step is shrunk to
/// land exactly on `t`. Each row of the right-hand side is an independent
/// computation, so parallel and sequential runs give identical bits.
pub fn evolve_master_with(
    gs: &GridState,
    spec: &MasterEquationSpec,
    t: f64,
    dt: f64,
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid("t", "time must be finite and >= 0"));
    }
    if !(dt > 0.0) {
        return Err(invalid("dt", "step must be positive"));
    }
    let bound = max_stable_dt(gs, spec);
    if opts.enforce_bound && dt > bound {
        return Err(invalid("dt", format!("step {dt:e} exceeds stability bound {bound:e}")));
    }
    let steps = (t / dt).ceil() as usize;
    let h = if steps == 0 { 0.0 } else { t / steps as f64 };
    let gen = Generator::new(gs, spec);
    let len = gs.rho.len();
    let limit = BLOWUP_FACTOR * gs.max_abs();

    let mut state = gs.clone();
    let mut records = vec![MomentRecord::of(&state, 0.0)];
    let mut k = vec![vec![ZERO; len]; 4];
    let mut stage = vec![ZERO; len];
    for step in 0..steps {
        let rho = &state.rho;
        gen.apply(rho, &mut k[0], opts.parallel);
        for (s, (r, d)) in stage.iter_mut().zip(rho.iter().zip(&k[0])) {
            *s = r + d * (0.5 * h);
        }
        gen.apply(&stage, &mut k[1], opts.parallel);
        for (s, (r, d)) in stage.iter_mut().zip(rho.iter().zip(&k[1])) {
            *s = r + d * (0.5 * h);
        }
        gen.apply(&stage, &mut k[2], opts.parallel);
        for (s, (r, d)) in stage.iter_mut().zip(rho.iter().zip(&k[2])) {
            *s = r + d * h;
        }
        gen.apply(&stage, &mut k[3], opts.parallel);
        let mut worst = 0.0f64;
        for (idx, r) in state.rho.iter_mut().enumerate() {
            *r += (k[0][idx] + (k[1][idx] + k[2][idx]) * 2.0 + k[3][idx]) * (h / 6.0);
            let a = r.norm();
            if !(a <= limit) {
                worst = f64::INFINITY;
            } else {
                worst = worst.max(a);
            }
        }
        let now = h * (step + 1) as f64;
        if !worst.is_finite() {
            return Err(Error::UnstableStep(now));
        }
        let last = step + 1 == steps;
        if last || (opts.record_every > 0 && (step + 1) % opts.record_every == 0) {
            records.push(MomentRecord::of(&state, if last { t } else { now }));
        }
    }
    let asym = state.max_asymmetry();
    if asym > HERMITICITY_TOL * gs.max_abs().max(1.0) {
        return Err(Error::NonHermitianDrift(asym));
    }
    Ok(Trajectory {
        state,
        records,
        steps,
        dt: h,
    })
}
