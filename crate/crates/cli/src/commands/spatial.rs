use zenolab::spatial::{evolve_master_with, max_stable_dt, EvolveOptions, GridState, MasterEquationSpec};
use zenolab::Table;

use super::{bad, unknown_mode};
use crate::{CliError, Context};

pub const PATH_KEYS: &[&str] = &[];

parameters! {
    /// moments | snapshot
    mode: String = "moments".into(),
    /// Grid points per axis
    n: u64 = 128,
    /// Length of the periodic box
    length: f64 = 1.0,
    /// Particle mass
    mass: f64 = 10.0,
    /// Initial packet centre
    x0: f64 = -0.1,
    /// Initial packet width
    sigma: f64 = 0.05,
    /// Initial packet momentum
    p0: f64 = 5.0,
    /// Localization rate
    lambda: f64 = 0.0,
    /// Friction rate
    friction: f64 = 0.0,
    /// Bath temperature; when set, lambda = mass * friction * temperature
    temperature: f64 = 0.0,
    /// Include the free kinetic term
    kinetic: bool = true,
    /// Evolution time
    t: f64 = 0.05,
    /// Step size (0 = largest stable step)
    dt: f64 = 0.0,
    /// Record moments every this many steps (0 = start and end only)
    record_every: u64 = 0,
    /// Allow steps above the stability bound
    force: bool = false,
}

pub fn run(p: &Params, ctx: &Context) -> Result<Table, CliError> {
    let spec = if p.temperature > 0.0 {
        if p.lambda != 0.0 {
            return Err(bad("lambda", "set either lambda or temperature, not both"));
        }
        MasterEquationSpec::thermal(p.mass, p.friction, p.temperature)?
    } else {
        MasterEquationSpec::new(p.lambda, p.friction, p.kinetic)?
    };
    let gs = GridState::gaussian(p.n as usize, p.length, p.mass, p.x0, p.sigma, p.p0)?;
    let dt = if p.dt == 0.0 { max_stable_dt(&gs, &spec) } else { p.dt };
    let opts = EvolveOptions {
        parallel: ctx.parallel,
        record_every: p.record_every as usize,
        enforce_bound: !p.force,
    };
    let traj = evolve_master_with(&gs, &spec, p.t, dt, &opts)?;
    match p.mode.as_str() {
        "moments" => Ok(traj.to_table()),
        "snapshot" => Ok(traj.state.snapshot_table()),
        other => Err(unknown_mode(other, &["moments", "snapshot"])),
    }
}
