//! Configuration, subcommands and report files for the `ncdirac` binary.

mod commands;
mod config;

pub use commands::{
    cmd_derive, cmd_evolve, cmd_limits, cmd_verify, derive, evolution_observables, CheckOutcome, CommandOutcome,
    DeriveTarget, Derivation, EvolutionSummary, LimitCheck,
};
pub use config::{EvolutionConfig, FieldConfig, NcConfig, RunConfig, Tolerances};

use crate::error::Error;

/// Process exit status for an outcome: 0 pass, 1 check failure, 2 usage or
/// configuration error.
pub fn exit_code(result: &Result<CommandOutcome, Error>) -> i32 {
    match result {
        Ok(o) if o.pass => 0,
        Ok(_) => 1,
        Err(e) if is_usage_error(e) => 2,
        Err(_) => 1,
    }
}

/// Errors caused by the input rather than by a failing check.
pub fn is_usage_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Config { .. }
            | Error::Json(_)
            | Error::Syntax { .. }
            | Error::UnknownSymbol { .. }
            | Error::InvalidBasis(_)
            | Error::UnboundConstant(_)
            | Error::OccupancySpill { .. }
    ) || matches!(e, Error::Io { path, .. } if path.extension().is_some_and(|x| x == "json"))
}
