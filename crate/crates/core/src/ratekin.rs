//! Classical rate equations for occupation probabilities.
//!
//! `dP_α/dt = Σ_β A_{αβ} P_β` with `A` in generator form: off-diagonal entries
//! are non-negative rates `β → α` and every column sums to zero, so
//! `A_{αα} = -Σ_{β≠α} A_{βα}`. The same generator drives the diagonal of a
//! density matrix (the Pauli equation), which ignores coherences entirely.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::DensityMatrix;
use crate::table::Table;
use crate::unitary::Hamiltonian;
use crate::vnmeasure::diagonal_freeze_rate;

const COLUMN_SUM_TOL: f64 = 1e-12;
const PROBABILITY_TOL: f64 = 1e-10;
const NEGATIVE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct RateMatrix {
    a: DMatrix<f64>,
}

impl RateMatrix {
    pub fn new(a: DMatrix<f64>) -> Result<Self> {
        if a.nrows() != a.ncols() || a.nrows() == 0 {
            return Err(Error::InvalidRateMatrix(format!(
                "expected a non-empty square matrix, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidRateMatrix("non-finite entry".into()));
        }
        let d = a.nrows();
        let scale = a.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for col in 0..d {
            for row in 0..d {
                if row != col && a[(row, col)] < 0.0 {
                    return Err(Error::InvalidRateMatrix(format!(
                        "negative rate {} at ({row}, {col})",
                        a[(row, col)]
                    )));
                }
            }
            let sum: f64 = a.column(col).iter().sum();
            if sum.abs() > COLUMN_SUM_TOL * scale {
                return Err(Error::InvalidRateMatrix(format!(
                    "column {col} sums to {sum:e}, not 0"
                )));
            }
        }
        Ok(RateMatrix { a })
    }

    /// Builds the generator from `(to, from, rate)` triples, filling in the
    /// diagonal. Repeated entries add up.
    pub fn from_off_diagonal(dim: usize, rates: &[(usize, usize, f64)]) -> Result<Self> {
        let mut a = DMatrix::zeros(dim, dim);
        for &(to, from, rate) in rates {
            if to >= dim || from >= dim {
                return Err(Error::InvalidRateMatrix(format!(
                    "index ({to}, {from}) out of range for dimension {dim}"
                )));
            }
            if to == from {
                return Err(Error::InvalidRateMatrix(format!(
                    "diagonal entry ({to}, {to}) is implied by the column sum"
                )));
            }
            a[(to, from)] += rate;
            a[(from, from)] -= rate;
        }
        Self::new(a)
    }

    /// Irreversible decay `0 → 1` at rate `gamma`.
    pub fn decay(gamma: f64) -> Result<Self> {
        Self::from_off_diagonal(2, &[(1, 0, gamma)])
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    /// JSON form `{"dim": d, "rates": [[row, col, value], ...]}` listing every
    /// nonzero entry, diagonal included.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let spec: RateMatrixJson =
            serde_json::from_str(text).map_err(|e| Error::InvalidRateMatrix(e.to_string()))?;
        let mut a = DMatrix::zeros(spec.dim, spec.dim);
        for &(row, col, value) in &spec.rates {
            if row >= spec.dim || col >= spec.dim {
                return Err(Error::InvalidRateMatrix(format!(
                    "index ({row}, {col}) out of range for dimension {}",
                    spec.dim
                )));
            }
            a[(row, col)] += value;
        }
        Self::new(a)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidRateMatrix(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let d = self.dim();
        let mut rates = Vec::new();
        for row in 0..d {
            for col in 0..d {
                let v = self.a[(row, col)];
                if v != 0.0 {
                    rates.push((row, col, v));
                }
            }
        }
        serde_json::to_value(RateMatrixJson { dim: d, rates }).expect("plain data")
    }

    /// `exp(A t)`.
    pub fn propagator(&self, t: f64) -> DMatrix<f64> {
        expm(&(&self.a * t))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RateMatrixJson {
    dim: usize,
    rates: Vec<(usize, usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityVector {
    p: Vec<f64>,
}

impl ProbabilityVector {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() || p.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidState("probabilities must be finite and >= 0".into()));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > PROBABILITY_TOL {
            return Err(Error::InvalidState(format!("probabilities sum to {total}")));
        }
        Ok(ProbabilityVector { p })
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut p = vec![0.0; dim];
        p[k] = 1.0;
        ProbabilityVector { p }
    }

    pub fn uniform(dim: usize) -> Self {
        ProbabilityVector {
            p: vec![1.0 / dim as f64; dim],
        }
    }

    pub fn from_density(rho: &DensityMatrix) -> Result<Self> {
        Self::new(rho.populations().iter().map(|v| v.max(0.0)).collect())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ClampReport {
    pub clamped: usize,
    pub most_negative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateSolution {
    pub p: ProbabilityVector,
    pub clamp: ClampReport,
}

/// Real matrix exponential by scaling and squaring of a Taylor series.
pub fn expm(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let norm = (0..n)
        .map(|c| m.column(c).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0f64, f64::max);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = m / 2f64.powi(squarings);
    let mut result = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    for k in 1..=30 {
        term = &term * &scaled / k as f64;
        result += &term;
        if term.amax() <= f64::EPSILON * 1e-3 * result.amax() {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

fn check_dims(a: &RateMatrix, d: usize) -> Result<()> {
    if a.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: d,
        });
    }
    Ok(())
}

/// `P(t) = exp(A t) P(0)`. Negative round-off is clamped to zero and reported;
/// anything below `-1e-12` is an error.
pub fn solve_rate_equation(a: &RateMatrix, p0: &ProbabilityVector, t: f64) -> Result<RateSolution> {
    check_dims(a, p0.dim())?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(crate::error::invalid("t", "time must be finite and >= 0"));
    }
    let p = a.propagator(t) * DVector::from_column_slice(&p0.p);
    let mut clamp = ClampReport::default();
    let mut out = Vec::with_capacity(p.len());
    for &v in p.iter() {
        if v < 0.0 {
            if v < -NEGATIVE_SLACK {
                return Err(Error::InvalidRateMatrix(format!(
                    "solution component {v:e} is negative beyond round-off"
                )));
            }
            clamp.clamped += 1;
            clamp.most_negative = clamp.most_negative.min(v);
            out.push(0.0);
        } else {
            out.push(v);
        }
    }
    Ok(RateSolution {
        p: ProbabilityVector::new(out)?,
        clamp,
    })
}

/// Table `t,p_0,...,p_{d-1}`.
pub fn rate_trajectory(a: &RateMatrix, p0: &ProbabilityVector, times: &[f64]) -> Result<Table> {
    let cols: Vec<String> = std::iter::once("t".to_string())
        .chain((0..a.dim()).map(|k| format!("p_{k}")))
        .collect();
    let mut table = Table::new(&cols);
    for &t in times {
        let sol = solve_rate_equation(a, p0, t)?;
        let mut row = vec![t.into()];
        row.extend(sol.p.as_slice().iter().map(|&v| v.into()));
        table.push(row);
    }
    Ok(table)
}

/// `dρ_αα/dt = Σ_β A_{αβ} ρ_ββ`; off-diagonal entries of `rho` are ignored.
pub fn pauli_equation_step(a: &RateMatrix, rho: &DensityMatrix) -> Result<Vec<f64>> {
    check_dims(a, rho.dim())?;
    let pops = DVector::from_vec(rho.populations());
    Ok((a.matrix() * pops).iter().copied().collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreezeReport {
    /// Population rates of the coherent evolution; identically zero.
    pub von_neumann_rates: Vec<f64>,
    pub pauli_rates: Vec<f64>,
    /// Populations after `t` under the rate equation.
    pub pauli_populations: Vec<f64>,
    /// Populations after `t` when the diagonal is kept diagonal at all times.
    pub frozen_populations: Vec<f64>,
    pub t: f64,
}

/// Evaluates both equations on the same diagonal state.
pub fn freeze_contrast(
    h: &Hamiltonian,
    a: &RateMatrix,
    rho_diag: &DensityMatrix,
    t: f64,
) -> Result<FreezeReport> {
    let von_neumann_rates = diagonal_freeze_rate(rho_diag, h)?;
    let pauli_rates = pauli_equation_step(a, rho_diag)?;
    let p0 = ProbabilityVector::from_density(rho_diag)?;
    let sol = solve_rate_equation(a, &p0, t)?;
    Ok(FreezeReport {
        von_neumann_rates,
        pauli_rates,
        pauli_populations: sol.p.p,
        frozen_populations: p0.p,
        t,
    })
}
