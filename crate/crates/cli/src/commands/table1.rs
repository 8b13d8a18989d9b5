use std::path::Path;

use zenolab::spatial::{decoherence_timescales, EnvironmentCatalog, SeparationRegime};
use zenolab::table::Cell;
use zenolab::Table;

use super::{bad, unknown_mode};
use crate::{CliError, Context};

pub const PATH_KEYS: &[&str] = &["environments"];

parameters! {
    /// lambda | timescales
    mode: String = "lambda".into(),
    /// Environments JSON file, or `builtin`
    environments: String = "builtin".into(),
    /// Separation for the timescale estimate, in cm
    dx: f64 = 1e-3,
}

pub fn run(p: &Params, _: &Context) -> Result<Table, CliError> {
    let catalog = if p.environments == "builtin" {
        EnvironmentCatalog::builtin()
    } else {
        EnvironmentCatalog::from_file(Path::new(&p.environments)).map_err(|e| bad("environments", e))?
    };
    match p.mode.as_str() {
        "lambda" => Ok(catalog.localization_table()?),
        "timescales" => {
            let mut table =
                Table::new(&["environment", "size_cm", "dx", "t_small", "t_single", "regime"]);
            for src in &catalog.environments {
                for &a in &catalog.sizes_cm {
                    let ts = decoherence_timescales(&src.for_radius(a)?, p.dx)?;
                    let regime = match ts.regime {
                        SeparationRegime::Small => "small",
                        SeparationRegime::SingleScattering => "single_scattering",
                    };
                    table.push(vec![
                        Cell::from(src.name.as_str()),
                        a.into(),
                        p.dx.into(),
                        ts.t_small.into(),
                        ts.t_single.into(),
                        regime.into(),
                    ]);
                }
            }
            Ok(table)
        }
        other => Err(unknown_mode(other, &["lambda", "timescales"])),
    }
}
