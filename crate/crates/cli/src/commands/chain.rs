use zenolab::qstate::{expectation, pauli_z, C64};
use zenolab::vnmeasure::{chain_sweep, entangle_measurement, entangle_with_pointers, two_step_chain};
use zenolab::{StateVector, Table};

use super::{bad, unknown_mode};
use crate::{CliError, Context};

pub const PATH_KEYS: &[&str] = &[];

parameters! {
    /// steps | two-step | entangle
    mode: String = "steps".into(),
    /// Coupling between the two levels
    v: f64 = 1.0,
    /// Level splitting
    e: f64 = 0.0,
    /// Total time (steps) or time per step (two-step)
    t: f64 = 0.05,
    /// Number of measured steps
    n: u64 = 10,
    /// Weight of level 1 in the measured superposition
    weight: f64 = 0.5,
    /// Overlap of the two pointer states (0 = ideal record)
    overlap: f64 = 0.0,
    /// Environment dimension for the ideal record
    n_env: u64 = 2,
}

pub fn run(p: &Params, _: &Context) -> Result<Table, CliError> {
    match p.mode.as_str() {
        "steps" => Ok(chain_sweep(p.v, p.e, p.t, &[p.n])?),
        "two-step" => {
            let r = two_step_chain(p.v, p.e, p.t)?;
            let mut table = Table::new(&["t", "p2_coherent", "p2_measured", "ratio"]);
            table.push(vec![
                p.t.into(),
                r.p2_coherent.into(),
                r.p2_measured.into(),
                (r.p2_measured / r.p2_coherent).into(),
            ]);
            Ok(table)
        }
        "entangle" => entangle(p),
        other => Err(unknown_mode(other, &["steps", "two-step", "entangle"])),
    }
}

fn entangle(p: &Params) -> Result<Table, CliError> {
    if !(0.0..=1.0).contains(&p.weight) {
        return Err(bad("weight", "must lie in [0, 1]"));
    }
    if !(0.0..=1.0).contains(&p.overlap) {
        return Err(bad("overlap", "must lie in [0, 1]"));
    }
    let system = StateVector::from_slice(&[
        C64::new(p.weight.sqrt(), 0.0),
        C64::new((1.0 - p.weight).sqrt(), 0.0),
    ])?;
    let rec = if p.overlap == 0.0 {
        entangle_measurement(&system, p.n_env as usize)?
    } else {
        let s = p.overlap;
        let pointers = [
            StateVector::from_slice(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)])?,
            StateVector::from_slice(&[C64::new(s, 0.0), C64::new((1.0 - s * s).sqrt(), 0.0)])?,
        ];
        entangle_with_pointers(&system, &pointers)?
    };
    let r = rec.reduced.matrix();
    let mut table = Table::new(&[
        "weight",
        "overlap",
        "rho11",
        "rho22",
        "coherence_re",
        "coherence_im",
        "z_mean",
        "joint_purity",
        "reduced_purity",
    ]);
    table.push(vec![
        p.weight.into(),
        p.overlap.into(),
        r[(0, 0)].re.into(),
        r[(1, 1)].re.into(),
        r[(0, 1)].re.into(),
        r[(0, 1)].im.into(),
        expectation(&rec.reduced, &pauli_z())?.into(),
        rec.joint.purity().into(),
        rec.reduced.purity().into(),
    ]);
    Ok(table)
}
