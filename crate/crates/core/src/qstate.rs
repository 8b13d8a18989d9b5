//! Dense complex linear algebra and quantum-state primitives.
//!
//! Everything here works on [`nalgebra::DMatrix`] of [`Complex64`] entries. The
//! propagator `e^{-iHt}` is always built from a Hermitian eigendecomposition so
//! that unitarity holds to round-off; no series expansion is used outside tests.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Process-wide numerical tolerances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericPolicy {
    /// Norm, trace and Hermiticity tolerance for validated states.
    pub state_tol: f64,
    /// Tolerance for operator identities and Hermiticity of inputs.
    pub operator_tol: f64,
    /// Smallest eigenvalue a density matrix may have.
    pub positivity_slack: f64,
    /// Largest Hilbert-space dimension accepted by the eigensolver.
    pub max_dim: usize,
    /// Iteration cap handed to the eigensolver.
    pub max_eigen_iterations: usize,
}

impl Default for NumericPolicy {
    fn default() -> Self {
        NumericPolicy {
            state_tol: 1e-12,
            operator_tol: 1e-10,
            positivity_slack: 1e-10,
            max_dim: 4096,
            max_eigen_iterations: 10_000,
        }
    }
}

static POLICY: OnceLock<NumericPolicy> = OnceLock::new();

impl NumericPolicy {
    /// The active policy. Defaults apply unless [`NumericPolicy::install`] ran first.
    pub fn global() -> &'static NumericPolicy {
        POLICY.get_or_init(NumericPolicy::default)
    }

    /// Installs a policy for the rest of the process. Returns `false` if a policy
    /// was already in effect.
    pub fn install(policy: NumericPolicy) -> bool {
        POLICY.set(policy).is_ok()
    }
}

/// Largest `|m_ij - conj(m_ji)|`.
pub fn max_asymmetry(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn check_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    Ok(m.nrows())
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Eigendecomposition `H = Q diag(λ) Q†` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: DVector<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn new(h: &CMatrix) -> Result<Self> {
        let policy = NumericPolicy::global();
        let n = check_square(h)?;
        if n > policy.max_dim {
            return Err(Error::DimensionTooLarge(n, policy.max_dim));
        }
        if !is_finite(h) {
            return Err(Error::InvalidState("Hamiltonian has non-finite entries".into()));
        }
        let asym = max_asymmetry(h);
        if asym > policy.operator_tol {
            return Err(Error::NonHermitianInput(asym));
        }
        let eig = SymmetricEigen::try_new(
            hermitian_part(h),
            f64::EPSILON,
            policy.max_eigen_iterations,
        )
        .ok_or(Error::DecompositionFailure)?;
        Ok(HermitianEigen {
            values: eig.eigenvalues,
            vectors: eig.eigenvectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `Q diag(e^{-iλt}) Q†`; exactly the identity at `t == 0`.
    pub fn propagator(&self, t: f64) -> CMatrix {
        let n = self.dim();
        if t == 0.0 {
            return CMatrix::identity(n, n);
        }
        let mut scaled = self.vectors.clone();
        for (k, mut col) in scaled.column_iter_mut().enumerate() {
            let phase = C64::from_polar(1.0, -self.values[k] * t);
            col *= phase;
        }
        scaled * self.vectors.adjoint()
    }
}

/// `U = e^{-iHt}` for Hermitian `h`.
pub fn herm_propagator(h: &CMatrix, t: f64) -> Result<CMatrix> {
    Ok(HermitianEigen::new(h)?.propagator(t))
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

/// Kronecker product `a ⊗ b`; the row index of the result is `i_a * dim_b + i_b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// A pure state. Construction through [`StateVector::new`] guarantees unit norm.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: CVector,
}

impl StateVector {
    /// Validates that `amplitudes` already has unit norm.
    pub fn new(amplitudes: CVector) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidState("empty state vector".into()));
        }
        let norm = amplitudes.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > NumericPolicy::global().state_tol {
            return Err(Error::InvalidState(format!("norm {norm} is not 1")));
        }
        Ok(StateVector { amplitudes })
    }

    /// Rescales to unit norm.
    pub fn normalized(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if amplitudes.is_empty() || norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize zero vector".into()));
        }
        Ok(StateVector {
            amplitudes: amplitudes.unscale(norm),
        })
    }

    pub fn from_slice(amplitudes: &[C64]) -> Result<Self> {
        Self::normalized(CVector::from_column_slice(amplitudes))
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index {k} out of range for dim {dim}");
        let mut v = CVector::zeros(dim);
        v[k] = ONE;
        StateVector { amplitudes: v }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn kron(&self, other: &StateVector) -> StateVector {
        StateVector {
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        }
    }

    pub fn projector(&self) -> CMatrix {
        &self.amplitudes * self.amplitudes.adjoint()
    }
}

/// A validated density operator: Hermitian, unit trace, positive up to slack.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let policy = NumericPolicy::global();
        let n = check_square(&matrix)?;
        if n == 0 {
            return Err(Error::InvalidState("empty density matrix".into()));
        }
        if !is_finite(&matrix) {
            return Err(Error::InvalidState("non-finite entries".into()));
        }
        let asym = max_asymmetry(&matrix);
        if asym > policy.state_tol {
            return Err(Error::NonHermitianInput(asym));
        }
        let matrix = hermitian_part(&matrix);
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > policy.state_tol {
            return Err(Error::InvalidState(format!("trace {trace} is not 1")));
        }
        let min_eig = SymmetricEigen::try_new(
            matrix.clone(),
            f64::EPSILON,
            policy.max_eigen_iterations,
        )
        .ok_or(Error::DecompositionFailure)?
        .eigenvalues
        .min();
        if min_eig < -policy.positivity_slack {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(DensityMatrix { matrix })
    }

    pub fn pure(state: &StateVector) -> Self {
        DensityMatrix {
            matrix: state.projector(),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix {
            matrix: CMatrix::identity(dim, dim).unscale(dim as f64),
        }
    }

    /// Diagonal state with the given populations (must sum to one).
    pub fn diagonal(populations: &[f64]) -> Result<Self> {
        if populations.iter().any(|&p| p < 0.0 || !p.is_finite()) {
            return Err(Error::InvalidState("populations must be non-negative".into()));
        }
        let diag = CVector::from_iterator(
            populations.len(),
            populations.iter().map(|&p| C64::new(p, 0.0)),
        );
        Self::new(CMatrix::from_diagonal(&diag))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `U ρ U†`.
    pub fn evolve(&self, u: &CMatrix) -> Result<DensityMatrix> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.nrows(),
            });
        }
        DensityMatrix::new(u * &self.matrix * u.adjoint())
    }
}

/// `Tr(ρA)` for Hermitian `A`.
pub fn expectation(rho: &DensityMatrix, a: &CMatrix) -> Result<f64> {
    if a.nrows() != rho.dim() || a.ncols() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: a.nrows(),
        });
    }
    let value = (rho.matrix() * a).trace();
    if value.im.abs() > NumericPolicy::global().operator_tol {
        return Err(Error::NonHermitianInput(value.im.abs()));
    }
    Ok(value.re)
}

/// Which factor of a bipartite space survives a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Traces out one factor of `ρ` on `C^{dA} ⊗ C^{dB}`.
pub fn partial_trace(
    rho: &DensityMatrix,
    dims: (usize, usize),
    keep: Subsystem,
) -> Result<DensityMatrix> {
    let (da, db) = dims;
    if da * db != rho.dim() || da == 0 || db == 0 {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: da * db,
        });
    }
    let m = rho.matrix();
    let reduced = match keep {
        Subsystem::A => CMatrix::from_fn(da, da, |i, j| {
            (0..db).map(|k| m[(i * db + k, j * db + k)]).sum()
        }),
        Subsystem::B => CMatrix::from_fn(db, db, |i, j| {
            (0..da).map(|k| m[(k * db + i, k * db + j)]).sum()
        }),
    };
    DensityMatrix::new(reduced)
}

/// JSON form of a complex matrix: row-major nested arrays of `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixRepr {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<[f64; 2]>>,
}

impl From<&CMatrix> for MatrixRepr {
    fn from(m: &CMatrix) -> Self {
        MatrixRepr {
            rows: m.nrows(),
            cols: m.ncols(),
            data: m
                .row_iter()
                .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }
}

impl TryFrom<MatrixRepr> for CMatrix {
    type Error = Error;

    fn try_from(repr: MatrixRepr) -> Result<Self> {
        if repr.data.len() != repr.rows {
            return Err(Error::DimensionMismatch {
                expected: repr.rows,
                found: repr.data.len(),
            });
        }
        let mut flat = Vec::with_capacity(repr.rows * repr.cols);
        for row in &repr.data {
            if row.len() != repr.cols {
                return Err(Error::DimensionMismatch {
                    expected: repr.cols,
                    found: row.len(),
                });
            }
            flat.extend(row.iter().map(|&[re, im]| C64::new(re, im)));
        }
        Ok(CMatrix::from_row_slice(repr.rows, repr.cols, &flat))
    }
}

impl Serialize for StateVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.amplitudes.iter().map(|z| [z.re, z.im]).collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for StateVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        let v = CVector::from_iterator(pairs.len(), pairs.iter().map(|&[re, im]| C64::new(re, im)));
        StateVector::new(v).map_err(serde::de::Error::custom)
    }
}

impl Serialize for DensityMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr::from(&self.matrix).serialize(s)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(d)?;
        let m = CMatrix::try_from(repr).map_err(serde::de::Error::custom)?;
        DensityMatrix::new(m).map_err(serde::de::Error::custom)
    }
}
