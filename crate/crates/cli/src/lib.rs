//! Front end for `relkac`: run configuration, subcommands and the acceptance suites.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod verify;

pub use config::{Overrides, Resolved, RunConfig};
pub use error::{CliError, CliResult};

/// Caps the global worker pool from `RELKAC_THREADS`; unset or 0 leaves rayon's default.
pub fn init_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("RELKAC_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| CliError::Config(format!("RELKAC_THREADS must be a non-negative integer, got '{v}'")))?;
    if n > 0 {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}
