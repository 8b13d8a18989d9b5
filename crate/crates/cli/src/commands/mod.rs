//! Subcommand implementations. Each module declares its parameters once with
//! [`parameters!`], which yields a serde struct with defaults (`Params`) and a
//! clap struct of optional overrides (`Flags`), and provides `run`.

use zenolab::Table;

use crate::{CliError, Context};

pub type Runner<P> = fn(&P, &Context) -> Result<Table, CliError>;

macro_rules! parameters {
    ($( $(#[$meta:meta])* $field:ident : $ty:ty = $default:expr ),* $(,)?) => {
        #[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
        #[serde(deny_unknown_fields)]
        pub struct Params {
            $( pub $field: $ty, )*
        }

        impl Default for Params {
            fn default() -> Self {
                Params { $( $field: $default, )* }
            }
        }

        #[derive(Debug, Clone, Default, clap::Args, serde::Serialize)]
        pub struct Flags {
            $(
                $(#[$meta])*
                #[arg(long, allow_negative_numbers = true)]
                #[serde(skip_serializing_if = "Option::is_none")]
                pub $field: Option<$ty>,
            )*
        }
    };
}

pub(crate) fn linspace(lo: f64, hi: f64, n: u64) -> Result<Vec<f64>, CliError> {
    if n == 0 {
        return Err(CliError::Config("invalid value for `points`: must be >= 1".into()));
    }
    if n == 1 {
        return Ok(vec![hi]);
    }
    Ok((0..n)
        .map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
        .collect())
}

pub(crate) fn bad(key: &str, why: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("invalid value for `{key}`: {why}"))
}

pub(crate) fn unknown_mode(mode: &str, allowed: &[&str]) -> CliError {
    bad("mode", format!("`{mode}` is not one of {}", allowed.join(", ")))
}

pub mod chain;
pub mod ifm;
pub mod pointer2;
pub mod rates;
pub mod ratio;
pub mod regimes;
pub mod spatial;
pub mod table1;
pub mod zeno;
