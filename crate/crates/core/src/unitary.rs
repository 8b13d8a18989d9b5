//! Survival probabilities under free evolution and under repeated measurement.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::qstate::{max_asymmetry, CMatrix, HermitianEigen, NumericPolicy, StateVector, C64};
use crate::table::{Cell, Table};

/// A validated Hermitian Hamiltonian (ħ = 1).
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    matrix: CMatrix,
}

impl Hamiltonian {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        let asym = max_asymmetry(&matrix);
        if asym > NumericPolicy::global().operator_tol {
            return Err(Error::NonHermitianInput(asym));
        }
        Ok(Hamiltonian { matrix })
    }

    /// `V(|1⟩⟨2| + |2⟩⟨1|) + E|2⟩⟨2|`, with `|1⟩` the first basis vector.
    pub fn two_level(v: f64, e: f64) -> Self {
        let z = C64::new(0.0, 0.0);
        Hamiltonian {
            matrix: CMatrix::from_row_slice(2, 2, &[z, v.into(), v.into(), e.into()]),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn eigen(&self) -> Result<HermitianEigen> {
        HermitianEigen::new(&self.matrix)
    }
}

/// Spectral weights of `|u⟩`, reused across many evaluation times.
///
/// With `c_k = |⟨q_k|u⟩|²`, the decay probability is
/// `1 - P(t) = Σ_{k<l} 4 c_k c_l sin²((λ_k - λ_l) t / 2)`, which stays accurate
/// when `1 - P` is far below machine epsilon relative to one.
#[derive(Debug, Clone)]
pub struct SurvivalAmplitude {
    energies: Vec<f64>,
    weights: Vec<f64>,
}

impl SurvivalAmplitude {
    pub fn new(h: &Hamiltonian, u: &StateVector) -> Result<Self> {
        if u.dim() != h.dim() {
            return Err(Error::DimensionMismatch {
                expected: h.dim(),
                found: u.dim(),
            });
        }
        let eig = h.eigen()?;
        let overlaps = eig.vectors.adjoint() * u.amplitudes();
        let mut energies = Vec::new();
        let mut weights = Vec::new();
        for (k, c) in overlaps.iter().enumerate() {
            let w = c.norm_sqr();
            if w > 0.0 {
                energies.push(eig.values[k]);
                weights.push(w);
            }
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        Ok(SurvivalAmplitude { energies, weights })
    }

    pub fn decay_probability(&self, t: f64) -> f64 {
        let mut q = 0.0;
        for k in 0..self.weights.len() {
            for l in (k + 1)..self.weights.len() {
                let s = ((self.energies[k] - self.energies[l]) * t * 0.5).sin();
                q += 4.0 * self.weights[k] * self.weights[l] * s * s;
            }
        }
        q.clamp(0.0, 1.0)
    }

    pub fn survival_probability(&self, t: f64) -> f64 {
        1.0 - self.decay_probability(t)
    }

    /// `[P(t/n)]^n`.
    pub fn repeated(&self, t: f64, n: u64) -> f64 {
        let q = self.decay_probability(t / n as f64);
        (n as f64 * (-q).ln_1p()).exp()
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid("t", format!("time must be finite and >= 0, got {t}")));
    }
    Ok(())
}

/// `P(t) = |⟨u|e^{-iHt}|u⟩|²`.
pub fn survival_probability(h: &Hamiltonian, u: &StateVector, t: f64) -> Result<f64> {
    check_time(t)?;
    Ok(SurvivalAmplitude::new(h, u)?.survival_probability(t))
}

/// `(ΔH)² = ⟨u|H²|u⟩ - ⟨u|H|u⟩²`.
pub fn energy_variance(h: &Hamiltonian, u: &StateVector) -> Result<f64> {
    if u.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: u.dim(),
        });
    }
    let hu = h.matrix() * u.amplitudes();
    let mean = u.amplitudes().dotc(&hu).re;
    let second = hu.norm_squared();
    Ok((second - mean * mean).max(0.0))
}

/// Quadratic short-time law `max(0, 1 - (ΔH)² t²)`.
pub fn short_time_prediction(variance: f64, t: f64) -> f64 {
    (1.0 - variance * t * t).clamp(0.0, 1.0)
}

/// Survival after `n` ideal projective checks spread evenly over `[0, t]`.
pub fn repeated_measurement_survival(
    h: &Hamiltonian,
    u: &StateVector,
    t: f64,
    n: u64,
) -> Result<f64> {
    check_time(t)?;
    if n == 0 {
        return Err(invalid("n", "measurement count must be >= 1"));
    }
    Ok(SurvivalAmplitude::new(h, u)?.repeated(t, n))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayLaw {
    pub gamma: f64,
}

impl DecayLaw {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(invalid("gamma", "decay rate must be >= 0"));
        }
        Ok(DecayLaw { gamma })
    }
}

/// `(e^{-Γt/n})^n`. The product collapses to `e^{-Γt}` analytically, so the
/// value is computed once and is identical for every `n`.
pub fn exponential_survival(law: DecayLaw, t: f64, _n: u64) -> f64 {
    (-law.gamma * t).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelTag {
    Unitary,
    RepeatedMeasurement,
    Exponential,
}

impl ModelTag {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelTag::Unitary => "unitary",
            ModelTag::RepeatedMeasurement => "repeated_measurement",
            ModelTag::Exponential => "exponential",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalCurve {
    pub times: Vec<f64>,
    pub probabilities: Vec<f64>,
    pub model_tag: ModelTag,
}

impl SurvivalCurve {
    pub fn unitary(h: &Hamiltonian, u: &StateVector, times: &[f64]) -> Result<Self> {
        let amp = SurvivalAmplitude::new(h, u)?;
        for &t in times {
            check_time(t)?;
        }
        Ok(SurvivalCurve {
            times: times.to_vec(),
            probabilities: times.iter().map(|&t| amp.survival_probability(t)).collect(),
            model_tag: ModelTag::Unitary,
        })
    }

    pub fn repeated(h: &Hamiltonian, u: &StateVector, times: &[f64], n: u64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "measurement count must be >= 1"));
        }
        let amp = SurvivalAmplitude::new(h, u)?;
        for &t in times {
            check_time(t)?;
        }
        Ok(SurvivalCurve {
            times: times.to_vec(),
            probabilities: times.iter().map(|&t| amp.repeated(t, n)).collect(),
            model_tag: ModelTag::RepeatedMeasurement,
        })
    }

    pub fn exponential(law: DecayLaw, times: &[f64]) -> Self {
        SurvivalCurve {
            times: times.to_vec(),
            probabilities: times.iter().map(|&t| exponential_survival(law, t, 1)).collect(),
            model_tag: ModelTag::Exponential,
        }
    }

    /// Columns `t,p,model_tag`.
    pub fn to_table(&self) -> Table {
        let mut table = Table::new(&["t", "p", "model_tag"]);
        for (&t, &p) in self.times.iter().zip(&self.probabilities) {
            table.push(vec![t.into(), p.into(), Cell::from(self.model_tag.as_str())]);
        }
        table
    }
}
