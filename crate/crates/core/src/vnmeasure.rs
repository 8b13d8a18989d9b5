//! Measurement as entanglement: dephasing channels, the two-step amplitude
//! chain with and without an intermediate record, ideal von Neumann couplings,
//! and the vanishing of population rates for diagonal states.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::qstate::{
    partial_trace, CMatrix, CVector, DensityMatrix, HermitianEigen, StateVector, Subsystem, C64,
    ZERO,
};
use crate::table::Table;
use crate::unitary::Hamiltonian;

/// Off-diagonal threshold used by [`diagonal_freeze_rate`].
pub const DIAGONAL_TOL: f64 = 1e-14;

const ORTHONORMAL_TOL: f64 = 1e-10;

/// Multiplies coherences in a chosen basis by `1 - strength`.
#[derive(Debug, Clone, PartialEq)]
pub struct DephasingChannel {
    /// Basis vectors as columns; `None` means the computational basis.
    basis: Option<CMatrix>,
    strength: f64,
}

impl DephasingChannel {
    pub fn computational(strength: f64) -> Result<Self> {
        check_strength(strength)?;
        Ok(DephasingChannel {
            basis: None,
            strength,
        })
    }

    pub fn with_basis(vectors: &[StateVector], strength: f64) -> Result<Self> {
        check_strength(strength)?;
        let dim = vectors.first().map(StateVector::dim).unwrap_or(0);
        if vectors.len() != dim || dim == 0 {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: vectors.len(),
            });
        }
        let cols: Vec<CVector> = vectors.iter().map(|v| v.amplitudes().clone()).collect();
        let basis = CMatrix::from_columns(&cols);
        let gram = basis.adjoint() * &basis;
        let dev = (gram - CMatrix::identity(dim, dim))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if dev > ORTHONORMAL_TOL {
            return Err(Error::NonOrthonormalBasis(dev));
        }
        Ok(DephasingChannel {
            basis: Some(basis),
            strength,
        })
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }
}

fn check_strength(strength: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&strength) {
        return Err(invalid("strength", format!("must lie in [0, 1], got {strength}")));
    }
    Ok(())
}

fn damp_off_diagonal(m: &mut CMatrix, keep: f64) {
    let n = m.nrows();
    for j in 0..n {
        for i in 0..n {
            if i != j {
                m[(i, j)] = if keep == 0.0 { ZERO } else { m[(i, j)] * keep };
            }
        }
    }
}

pub fn apply_dephasing(rho: &DensityMatrix, ch: &DephasingChannel) -> Result<DensityMatrix> {
    if let Some(b) = &ch.basis {
        if b.nrows() != rho.dim() {
            return Err(Error::DimensionMismatch {
                expected: rho.dim(),
                found: b.nrows(),
            });
        }
    }
    if ch.strength == 0.0 {
        return Ok(rho.clone());
    }
    let keep = 1.0 - ch.strength;
    match &ch.basis {
        None => {
            let mut m = rho.matrix().clone();
            damp_off_diagonal(&mut m, keep);
            DensityMatrix::new(m)
        }
        Some(b) => {
            let mut in_basis = b.adjoint() * rho.matrix() * b;
            damp_off_diagonal(&mut in_basis, keep);
            DensityMatrix::new(b * in_basis * b.adjoint())
        }
    }
}

/// Outcome of the two-step chain `0 → t → 2t` for the two-level system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainResult {
    pub p2_coherent: f64,
    pub p2_measured: f64,
    /// `a_ij = ⟨j|U(t)|i⟩` as `[re, im]`, indexed `[i][j]` with levels 1, 2 at 0, 1.
    pub amplitudes: [[[f64; 2]; 2]; 2],
}

fn chain_propagator(v: f64, e: f64, t: f64) -> Result<CMatrix> {
    Ok(HermitianEigen::new(Hamiltonian::two_level(v, e).matrix())?.propagator(t))
}

/// Probability of level 2 after two equal steps of length `t`, once with the
/// intermediate superposition intact and once with its phases removed.
pub fn two_step_chain(v: f64, e: f64, t: f64) -> Result<ChainResult> {
    if !(t >= 0.0) {
        return Err(invalid("t", "step time must be >= 0"));
    }
    let u = chain_propagator(v, e, t)?;
    // a_ij: amplitude to go from |i⟩ to |j⟩ in one step.
    let a = |i: usize, j: usize| u[(j, i)];
    let coherent = a(0, 1) * a(1, 1) + a(0, 0) * a(0, 1);
    let p2_coherent = coherent.norm_sqr();
    let p2_measured = (a(0, 1) * a(1, 1)).norm_sqr() + (a(0, 0) * a(0, 1)).norm_sqr();
    let pair = |z: C64| [z.re, z.im];
    Ok(ChainResult {
        p2_coherent,
        p2_measured,
        amplitudes: [[pair(a(0, 0)), pair(a(0, 1))], [pair(a(1, 0)), pair(a(1, 1))]],
    })
}

/// `n` equal unitary steps over `t_total`, each followed by complete dephasing
/// in the level basis. Returns the final population of level 2.
pub fn n_step_measured_chain(v: f64, e: f64, t_total: f64, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(invalid("n", "step count must be >= 1"));
    }
    if !(t_total >= 0.0) {
        return Err(invalid("t_total", "must be >= 0"));
    }
    let u = chain_propagator(v, e, t_total / n as f64)?;
    let record = DephasingChannel::computational(1.0)?;
    let mut rho = DensityMatrix::pure(&StateVector::basis(2, 0));
    for _ in 0..n {
        rho = apply_dephasing(&rho.evolve(&u)?, &record)?;
    }
    Ok(rho.matrix()[(1, 1)].re)
}

/// Table `n,p2_coherent,p2_measured` for a list of step counts.
pub fn chain_sweep(v: f64, e: f64, t_total: f64, steps: &[u64]) -> Result<Table> {
    let coherent = n_step_measured_chain(v, e, t_total, 1)?;
    let mut table = Table::new(&["n", "p2_coherent", "p2_measured"]);
    for &n in steps {
        let measured = n_step_measured_chain(v, e, t_total, n)?;
        table.push(vec![n.into(), coherent.into(), measured.into()]);
    }
    Ok(table)
}

#[derive(Debug, Clone)]
pub struct Entangled {
    pub joint: DensityMatrix,
    pub reduced: DensityMatrix,
}

/// Ideal recoil-free record: `|n⟩|Φ₀⟩ → |n⟩|Φ_n⟩` with `Φ_n` the `n`-th
/// environment basis vector, realised as the controlled cyclic shift
/// `Σ_n |n⟩⟨n| ⊗ S^n` acting on `|ψ⟩|Φ₀⟩`.
pub fn entangle_measurement(system: &StateVector, n_env: usize) -> Result<Entangled> {
    let d = system.dim();
    if n_env < d {
        return Err(Error::EnvironmentTooSmall {
            system: d,
            env: n_env,
        });
    }
    let dim = d * n_env;
    let mut coupling = CMatrix::zeros(dim, dim);
    for n in 0..d {
        for k in 0..n_env {
            let to = (k + n) % n_env;
            coupling[(n * n_env + to, n * n_env + k)] = C64::new(1.0, 0.0);
        }
    }
    let ready = system.kron(&StateVector::basis(n_env, 0));
    let joint_state = StateVector::new(coupling * ready.amplitudes())?;
    finish(joint_state, d, n_env)
}

/// Same record with caller-supplied pointer states `Φ_n`, which may overlap.
pub fn entangle_with_pointers(system: &StateVector, pointers: &[StateVector]) -> Result<Entangled> {
    let d = system.dim();
    if pointers.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: pointers.len(),
        });
    }
    let n_env = pointers[0].dim();
    if pointers.iter().any(|p| p.dim() != n_env) {
        return Err(invalid("pointers", "pointer states must share one dimension"));
    }
    let mut joint = CVector::zeros(d * n_env);
    for (n, phi) in pointers.iter().enumerate() {
        let c = system.amplitudes()[n];
        for k in 0..n_env {
            joint[n * n_env + k] = c * phi.amplitudes()[k];
        }
    }
    finish(StateVector::new(joint)?, d, n_env)
}

fn finish(joint_state: StateVector, d: usize, n_env: usize) -> Result<Entangled> {
    let joint = DensityMatrix::pure(&joint_state);
    let reduced = partial_trace(&joint, (d, n_env), Subsystem::A)?;
    Ok(Entangled { joint, reduced })
}

/// `dρ_nn/dt = -i Σ_k (H_nk ρ_kn - ρ_nk H_kn)` for a state diagonal in the
/// basis of `h`'s matrix representation.
pub fn diagonal_freeze_rate(rho: &DensityMatrix, h: &Hamiltonian) -> Result<Vec<f64>> {
    let d = rho.dim();
    if h.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: h.dim(),
        });
    }
    let m = rho.matrix();
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                worst = worst.max(m[(i, j)].norm());
            }
        }
    }
    if worst > DIAGONAL_TOL {
        return Err(Error::NotDiagonal(worst));
    }
    Ok(von_neumann_population_rates(m, h.matrix()))
}

/// Population rates of the von Neumann equation, without any diagonality check.
pub fn von_neumann_population_rates(rho: &CMatrix, h: &CMatrix) -> Vec<f64> {
    let d = rho.nrows();
    (0..d)
        .map(|n| {
            let mut acc = ZERO;
            for k in 0..d {
                acc += h[(n, k)] * rho[(k, n)] - rho[(n, k)] * h[(k, n)];
            }
            // -i * acc; acc is purely imaginary for Hermitian inputs.
            acc.im
        })
        .collect()
}
