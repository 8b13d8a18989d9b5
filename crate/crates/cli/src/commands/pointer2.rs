use zenolab::apparatus::{
    two_state_onset_exponent, two_state_rate_regime, two_state_time_series, ApparatusProfile,
    TwoStatePointerModel,
};
use zenolab::fit::LinearFit;
use zenolab::Table;

use super::{linspace, unknown_mode};
use crate::{CliError, Context};

pub const PATH_KEYS: &[&str] = &[];

parameters! {
    /// series | rate | onset
    mode: String = "series".into(),
    /// Coupling between the two levels
    v: f64 = 1.0,
    /// Level splitting
    e: f64 = 0.0,
    /// Pointer coupling strength
    gamma: f64 = 10.0,
    /// Width of the pointer momentum distribution
    sigma: f64 = 1.0,
    /// First sample time
    t_min: f64 = 0.0,
    /// Last sample time
    t_max: f64 = 10.0,
    /// Number of sample times
    points: u64 = 41,
    /// Momentum grid size
    profile_points: u64 = 8001,
    /// Momentum grid half-width in units of sigma
    half_width: f64 = 8.0,
}

pub fn run(p: &Params, _: &Context) -> Result<Table, CliError> {
    let model = TwoStatePointerModel::new(p.v, p.e, p.gamma)?;
    let app = ApparatusProfile::gaussian_with_range(p.sigma, p.profile_points as usize, p.half_width)?;
    let times = linspace(p.t_min, p.t_max, p.points)?;
    let fit_row = |fit: LinearFit| {
        let mut table = Table::new(&["gamma", "slope", "intercept", "r_squared"]);
        table.push(vec![p.gamma.into(), fit.slope.into(), fit.intercept.into(), fit.r_squared.into()]);
        table
    };
    match p.mode.as_str() {
        "series" => Ok(two_state_time_series(&model, &app, &times)?),
        "rate" => Ok(fit_row(two_state_rate_regime(&model, &app, &times)?)),
        "onset" => Ok(fit_row(two_state_onset_exponent(&model, &app, &times)?)),
        other => Err(unknown_mode(other, &["series", "rate", "onset"])),
    }
}
