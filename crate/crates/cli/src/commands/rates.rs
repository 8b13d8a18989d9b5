use std::path::Path;

use zenolab::qstate::C64;
use zenolab::ratekin::{freeze_contrast, rate_trajectory, ProbabilityVector, RateMatrix};
use zenolab::{CMatrix, DensityMatrix, Hamiltonian, Table};

use super::{bad, linspace, unknown_mode};
use crate::{CliError, Context};

pub const PATH_KEYS: &[&str] = &["rates"];

parameters! {
    /// trajectory | freeze
    mode: String = "trajectory".into(),
    /// Rate-matrix JSON file; when empty a two-level decay with rate `gamma` is used
    rates: String = String::new(),
    /// Decay rate of the default two-level generator
    gamma: f64 = 1.0,
    /// Initial probabilities, comma separated (default: all in level 0)
    #[arg(value_delimiter = ',')]
    p0: Vec<f64> = Vec::new(),
    /// Last output time
    t_max: f64 = 5.0,
    /// Number of output times
    points: u64 = 11,
    /// Nearest-neighbour coupling of the comparison Hamiltonian (freeze)
    v: f64 = 1.0,
    /// Level spacing of the comparison Hamiltonian (freeze)
    e: f64 = 0.0,
}

/// Tight-binding chain with spacing `e` and hopping `v`.
fn chain_hamiltonian(dim: usize, v: f64, e: f64) -> Result<Hamiltonian, CliError> {
    let mut h = CMatrix::zeros(dim, dim);
    for k in 0..dim {
        h[(k, k)] = C64::new(e * k as f64, 0.0);
        if k + 1 < dim {
            h[(k, k + 1)] = C64::new(v, 0.0);
            h[(k + 1, k)] = C64::new(v, 0.0);
        }
    }
    Ok(Hamiltonian::new(h)?)
}

pub fn run(p: &Params, _: &Context) -> Result<Table, CliError> {
    let a = if p.rates.is_empty() {
        RateMatrix::decay(p.gamma)?
    } else {
        RateMatrix::from_file(Path::new(&p.rates)).map_err(|e| bad("rates", e))?
    };
    let p0 = if p.p0.is_empty() {
        ProbabilityVector::basis(a.dim(), 0)
    } else if p.p0.len() != a.dim() {
        return Err(bad("p0", format!("expected {} entries, got {}", a.dim(), p.p0.len())));
    } else {
        ProbabilityVector::new(p.p0.clone()).map_err(|e| bad("p0", e))?
    };
    match p.mode.as_str() {
        "trajectory" => Ok(rate_trajectory(&a, &p0, &linspace(0.0, p.t_max, p.points)?)?),
        "freeze" => {
            let h = chain_hamiltonian(a.dim(), p.v, p.e)?;
            let rho = DensityMatrix::diagonal(p0.as_slice())?;
            let r = freeze_contrast(&h, &a, &rho, p.t_max)?;
            let mut table = Table::new(&[
                "level",
                "population",
                "von_neumann_rate",
                "pauli_rate",
                "frozen_population",
                "pauli_population",
            ]);
            for k in 0..a.dim() {
                table.push(vec![
                    k.into(),
                    p0.as_slice()[k].into(),
                    r.von_neumann_rates[k].into(),
                    r.pauli_rates[k].into(),
                    r.frozen_populations[k].into(),
                    r.pauli_populations[k].into(),
                ]);
            }
            Ok(table)
        }
        other => Err(unknown_mode(other, &["trajectory", "freeze"])),
    }
}
