use zenolab::spatial::{decoherence_relaxation_ratio, MacroscopicBody};
use zenolab::Table;

use crate::{CliError, Context};

pub const PATH_KEYS: &[&str] = &[];

parameters! {
    /// Mass in kg
    mass: f64 = 1e-3,
    /// Temperature in K
    temperature: f64 = 300.0,
    /// Separation in m
    dx: f64 = 0.01,
}

pub fn run(p: &Params, _: &Context) -> Result<Table, CliError> {
    let body = MacroscopicBody::new(p.mass, p.temperature, p.dx)?;
    let r = decoherence_relaxation_ratio(&body);
    let mut table = Table::new(&["mass", "temperature", "dx", "thermal_wavelength", "ratio", "log10_ratio"]);
    table.push(vec![
        p.mass.into(),
        p.temperature.into(),
        p.dx.into(),
        r.thermal_wavelength.into(),
        r.ratio.into(),
        r.ratio.log10().into(),
    ]);
    Ok(table)
}
