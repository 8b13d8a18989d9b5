use zenolab::qstate::herm_propagator;
use zenolab::unitary::{
    energy_variance, exponential_survival, repeated_measurement_survival, short_time_prediction,
    survival_probability, DecayLaw, SurvivalCurve,
};
use zenolab::{Hamiltonian, StateVector, Table};

use super::linspace;
use crate::{CliError, Context};

pub const PATH_KEYS: &[&str] = &[];

parameters! {
    /// Coupling between the two levels
    v: f64 = 1.0,
    /// Level splitting
    e: f64 = 0.0,
    /// Total time
    t: f64 = 1.0,
    /// Number of equally spaced checks in [0, t]
    n: u64 = 1,
    /// Rate of the comparison exponential decay
    gamma: f64 = 1.0,
    /// Emit curves on this many times in [0, t] instead of one summary row
    points: u64 = 0,
}

pub fn run(p: &Params, _: &Context) -> Result<Table, CliError> {
    let h = Hamiltonian::two_level(p.v, p.e);
    let u = StateVector::basis(2, 0);
    let law = DecayLaw::new(p.gamma)?;
    if p.points > 0 {
        let times = linspace(0.0, p.t, p.points)?;
        let mut table = SurvivalCurve::unitary(&h, &u, &times)?.to_table();
        table.extend(SurvivalCurve::repeated(&h, &u, &times, p.n)?.to_table());
        table.extend(SurvivalCurve::exponential(law, &times).to_table());
        return Ok(table);
    }
    let variance = energy_variance(&h, &u)?;
    let repeated = repeated_measurement_survival(&h, &u, p.t, p.n)?;
    // Survival once more straight from the propagator, as a consistency column.
    let prop = herm_propagator(h.matrix(), p.t)?;
    let direct = prop[(0, 0)].norm_sqr();
    let mut table = Table::new(&[
        "n",
        "t",
        "p_survival",
        "p_propagator",
        "p_repeated",
        "p_quadratic",
        "zeno_prediction",
        "p_exponential",
    ]);
    table.push(vec![
        p.n.into(),
        p.t.into(),
        survival_probability(&h, &u, p.t)?.into(),
        direct.into(),
        repeated.into(),
        short_time_prediction(variance, p.t).into(),
        short_time_prediction(variance / p.n.max(1) as f64, p.t).into(),
        exponential_survival(law, p.t, p.n).into(),
    ]);
    Ok(table)
}
