use zenolab::ifm::{binomial_sigma, ifm_sweep, outcomes_table, run_ifm, run_ifm_monte_carlo, IfmConfig};
use zenolab::Table;

use super::unknown_mode;
use crate::{CliError, Context};

pub const PATH_KEYS: &[&str] = &[];

parameters! {
    /// exact | monte-carlo
    mode: String = "exact".into(),
    /// Number of passes through the loop
    n: u64 = 5,
    /// Absorbing object in the vertical arm
    object: bool = true,
    /// Rotation per pass (0 = pi / 2n)
    delta_theta: f64 = 0.0,
    /// Photons for the Monte Carlo mode
    trials: u64 = 100_000,
    /// Seed for the Monte Carlo mode
    seed: u64 = 1,
}

fn config(p: &Params) -> Result<IfmConfig, CliError> {
    let cfg = IfmConfig::new(p.n, p.object)?;
    Ok(if p.delta_theta == 0.0 { cfg } else { cfg.with_delta_theta(p.delta_theta)? })
}

pub fn run(p: &Params, _: &Context) -> Result<Table, CliError> {
    let cfg = config(p)?;
    match p.mode.as_str() {
        "exact" if p.delta_theta == 0.0 => Ok(outcomes_table(&ifm_sweep(&[p.n], p.object)?)),
        "exact" => Ok(outcomes_table(&[run_ifm(&cfg)])),
        "monte-carlo" => {
            let exact = run_ifm(&cfg);
            let mc = run_ifm_monte_carlo(&cfg, p.trials, p.seed)?;
            let mut table = Table::new(&[
                "N",
                "trials",
                "seed",
                "frac_h",
                "frac_v",
                "frac_absorbed",
                "exact_h",
                "sigma_h",
            ]);
            table.push(vec![
                p.n.into(),
                p.trials.into(),
                p.seed.into(),
                mc.fraction_h().into(),
                mc.fraction_v().into(),
                mc.fraction_absorbed().into(),
                exact.p_h.into(),
                binomial_sigma(exact.p_h, p.trials).into(),
            ]);
            Ok(table)
        }
        other => Err(unknown_mode(other, &["exact", "monte-carlo"])),
    }
}
