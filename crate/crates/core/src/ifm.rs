//! Interaction-free interrogation with a polarization-rotating loop.
//!
//! A horizontally polarized photon passes `N` times through a rotator that
//! turns the polarization by `Δθ`. Without the object the rotations add up to
//! `NΔθ = π/2` and the photon leaves vertical. With an absorbing object in the
//! vertical arm each pass projects onto horizontal, so the photon survives
//! horizontally with probability `cos^{2N}(Δθ)`.
//!
//! The interferometer is reduced to two channels, a lossless rotation and an
//! absorber that removes the vertical component.

use std::f64::consts::FRAC_PI_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::qstate::C64;
use crate::table::Table;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarizationState {
    pub amp_h: C64,
    pub amp_v: C64,
    pub p_absorbed: f64,
}

impl PolarizationState {
    pub fn horizontal() -> Self {
        PolarizationState {
            amp_h: C64::new(1.0, 0.0),
            amp_v: C64::new(0.0, 0.0),
            p_absorbed: 0.0,
        }
    }

    pub fn p_h(&self) -> f64 {
        self.amp_h.norm_sqr()
    }

    pub fn p_v(&self) -> f64 {
        self.amp_v.norm_sqr()
    }

    pub fn total(&self) -> f64 {
        self.p_h() + self.p_v() + self.p_absorbed
    }

    pub fn rotate(&mut self, angle: f64) {
        let (s, c) = angle.sin_cos();
        let (h, v) = (self.amp_h, self.amp_v);
        self.amp_h = h * c - v * s;
        self.amp_v = h * s + v * c;
    }

    /// Moves the vertical weight into the absorbed probability.
    pub fn absorb_vertical(&mut self) {
        self.p_absorbed += self.amp_v.norm_sqr();
        self.amp_v = C64::new(0.0, 0.0);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IfmConfig {
    pub n_cycles: u64,
    pub object_present: bool,
    pub delta_theta: f64,
}

impl IfmConfig {
    /// Rotation `π/(2N)` per pass.
    pub fn new(n_cycles: u64, object_present: bool) -> Result<Self> {
        if n_cycles == 0 {
            return Err(invalid("n", "need at least one cycle"));
        }
        Ok(IfmConfig {
            n_cycles,
            object_present,
            delta_theta: FRAC_PI_2 / n_cycles as f64,
        })
    }

    pub fn with_delta_theta(mut self, delta_theta: f64) -> Result<Self> {
        if !(delta_theta > 0.0 && delta_theta <= FRAC_PI_2) {
            return Err(invalid("delta_theta", "must lie in (0, pi/2]"));
        }
        self.delta_theta = delta_theta;
        Ok(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IfmOutcome {
    pub n_cycles: u64,
    pub p_h: f64,
    pub p_v: f64,
    pub p_absorbed: f64,
}

pub fn run_ifm(cfg: &IfmConfig) -> IfmOutcome {
    let mut state = PolarizationState::horizontal();
    for _ in 0..cfg.n_cycles {
        state.rotate(cfg.delta_theta);
        if cfg.object_present {
            state.absorb_vertical();
        }
    }
    IfmOutcome {
        n_cycles: cfg.n_cycles,
        p_h: state.p_h(),
        p_v: state.p_v(),
        p_absorbed: state.p_absorbed,
    }
}

/// Ideal runs (`Δθ = π/2N`) for each cycle count.
pub fn ifm_sweep(n_values: &[u64], object_present: bool) -> Result<Vec<IfmOutcome>> {
    n_values
        .iter()
        .map(|&n| IfmConfig::new(n, object_present).map(|cfg| run_ifm(&cfg)))
        .collect()
}

/// Columns `N,p_h,p_v,p_absorbed`.
pub fn outcomes_table(outcomes: &[IfmOutcome]) -> Table {
    let mut table = Table::new(&["N", "p_h", "p_v", "p_absorbed"]);
    for o in outcomes {
        table.push(vec![
            o.n_cycles.into(),
            o.p_h.into(),
            o.p_v.into(),
            o.p_absorbed.into(),
        ]);
    }
    table
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloOutcome {
    pub trials: u64,
    pub horizontal: u64,
    pub vertical: u64,
    pub absorbed: u64,
}

impl MonteCarloOutcome {
    pub fn fraction_h(&self) -> f64 {
        self.horizontal as f64 / self.trials as f64
    }

    pub fn fraction_v(&self) -> f64 {
        self.vertical as f64 / self.trials as f64
    }

    pub fn fraction_absorbed(&self) -> f64 {
        self.absorbed as f64 / self.trials as f64
    }
}

/// Binomial standard error of a fraction estimated from `trials` samples.
pub fn binomial_sigma(p: f64, trials: u64) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

enum Fate {
    Horizontal,
    Vertical,
    Absorbed,
}

fn photon(cfg: &IfmConfig, rng: &mut ChaCha8Rng) -> Fate {
    let mut state = PolarizationState::horizontal();
    for _ in 0..cfg.n_cycles {
        state.rotate(cfg.delta_theta);
        if cfg.object_present {
            // The absorber either fires or projects the photon onto H.
            let p_v = state.p_v() / (state.p_h() + state.p_v());
            if rng.gen::<f64>() < p_v {
                return Fate::Absorbed;
            }
            state = PolarizationState::horizontal();
        }
    }
    if rng.gen::<f64>() < state.p_h() / (state.p_h() + state.p_v()) {
        Fate::Horizontal
    } else {
        Fate::Vertical
    }
}

const MC_CHUNK: u64 = 4096;

/// Photon-by-photon sampling. Photons are simulated in fixed chunks, each
/// with its own stream derived from `seed`, so the result does not depend on
/// the thread count.
pub fn run_ifm_monte_carlo(cfg: &IfmConfig, trials: u64, seed: u64) -> Result<MonteCarloOutcome> {
    if trials == 0 {
        return Err(invalid("trials", "need at least one photon"));
    }
    let chunks = trials.div_ceil(MC_CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let size = MC_CHUNK.min(trials - c * MC_CHUNK);
            let mut tally = [0u64; 3];
            for _ in 0..size {
                match photon(cfg, &mut rng) {
                    Fate::Horizontal => tally[0] += 1,
                    Fate::Vertical => tally[1] += 1,
                    Fate::Absorbed => tally[2] += 1,
                }
            }
            tally
        })
        .reduce(|| [0; 3], |a, b| [a[0] + b[0], a[1] + b[1], a[2] + b[2]]);
    Ok(MonteCarloOutcome {
        trials,
        horizontal: counts[0],
        vertical: counts[1],
        absorbed: counts[2],
    })
}
