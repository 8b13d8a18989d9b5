use std::path::Path;

use zenolab::apparatus::{
    golden_rule_rate, log_space, regime_scan, transition_probability_alpha_e, ApparatusProfile,
    LevelStructure,
};
use zenolab::Table;

use super::{bad, linspace, unknown_mode};
use crate::{CliError, Context};

pub const PATH_KEYS: &[&str] = &["levels"];

parameters! {
    /// scan | spectrum
    mode: String = "scan".into(),
    /// Level-structure JSON file, or `builtin`
    levels: String = "builtin".into(),
    /// Elapsed time
    t: f64 = 1.0,
    /// Smallest pointer coupling of the scan
    gamma_min: f64 = 0.01,
    /// Largest pointer coupling of the scan
    gamma_max: f64 = 10000.0,
    /// Number of log-spaced couplings
    count: u64 = 41,
    /// Pointer coupling for the spectrum
    gamma: f64 = 1.0,
    /// Width of the pointer momentum distribution
    sigma: f64 = 1.0,
    /// Momentum grid size
    profile_points: u64 = 257,
    /// Built-in structure: coupling strength of the broad background
    amplitude: f64 = 0.01,
    /// Built-in structure: width of the broad background
    width: f64 = 20.0,
    /// Built-in structure: height of the narrow peak relative to the background
    peak_height: f64 = 5.0,
    /// Built-in structure: distance of the peak from the initial energy
    peak_offset: f64 = 10.0,
    /// Built-in structure: width of the peak
    peak_width: f64 = 1.0,
    /// Built-in structure: energy grid half-range
    e_range: f64 = 100.0,
    /// Built-in structure: energy grid size
    e_points: u64 = 4001,
}

/// Flat level density with a broad coupling background and a narrow peak
/// above the initial energy.
pub fn builtin_levels(p: &Params) -> Result<LevelStructure, CliError> {
    let (a, w) = (p.amplitude, p.width);
    let (b, d, pw) = (p.peak_height * p.amplitude, p.peak_offset, p.peak_width);
    let v_sq = move |e: f64| {
        a * (-(e * e) / (2.0 * w * w)).exp() + b * (-((e - d) * (e - d)) / (2.0 * pw * pw)).exp()
    };
    Ok(LevelStructure::sampled(
        -p.e_range,
        p.e_range,
        p.e_points as usize,
        |_| 1.0,
        v_sq,
        p.gamma,
        0.0,
    )?)
}

fn levels(p: &Params) -> Result<LevelStructure, CliError> {
    if p.levels == "builtin" {
        builtin_levels(p)
    } else {
        LevelStructure::from_file(Path::new(&p.levels)).map_err(|e| bad("levels", e))
    }
}

pub fn run(p: &Params, ctx: &Context) -> Result<Table, CliError> {
    let ls = levels(p)?;
    let app = ApparatusProfile::gaussian(p.sigma, p.profile_points as usize)?;
    match p.mode.as_str() {
        "scan" => {
            if !(p.gamma_min > 0.0 && p.gamma_max > p.gamma_min) {
                return Err(bad("gamma_min", "need 0 < gamma_min < gamma_max"));
            }
            if p.count < 2 {
                return Err(bad("count", "need at least two couplings"));
            }
            let gammas = log_space(p.gamma_min, p.gamma_max, p.count as usize);
            let scan = regime_scan(&ls, &app, &gammas, p.t, ctx.parallel)?;
            let golden = golden_rule_rate(&ls) * p.t;
            let mut table = Table::new(&["gamma", "p_alpha", "p_golden_rule", "perturbative"]);
            for pt in &scan.points {
                table.push(vec![
                    pt.gamma.into(),
                    pt.p_alpha.into(),
                    golden.into(),
                    u64::from(!pt.advisory).into(),
                ]);
            }
            Ok(table)
        }
        "spectrum" => {
            let ls = ls.with_gamma(p.gamma);
            let grid = &ls.energy_grid;
            let energies = linspace(grid[0], grid[grid.len() - 1], p.e_points.min(grid.len() as u64))?;
            let mut table = Table::new(&["E", "p_alpha_e"]);
            for e in energies {
                table.push(vec![e.into(), transition_probability_alpha_e(&ls, &app, e, p.t).into()]);
            }
            Ok(table)
        }
        other => Err(unknown_mode(other, &["scan", "spectrum"])),
    }
}
