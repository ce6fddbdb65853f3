//! `submodlab`: generate instances, run algorithms, check properties and
//! replay factor-revealing certificates.

mod args;
mod commands;
mod record;

use std::process::ExitCode;

use clap::Parser;
use submodlab_core::Error;

use args::{Cli, Command};

/// Outcome of a subcommand that ran to completion.
pub enum Outcome {
    Pass,
    /// Property or certificate failed; the report was still printed.
    Fail,
}

/// Exit code for each error class.
///
/// 2: bad input (flags, sets, instances, orders, files, missing certificate).
/// 3: resource guards (scale guards, buffer capacity).
/// 4: a check failed or the streaming model was violated.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Param(_)
        | Error::InvalidSet { .. }
        | Error::InvalidInstance(_)
        | Error::InvalidOrder(_)
        | Error::NoCertificate(_)
        | Error::Json(_) => 2,
        Error::ScaleGuard { .. } | Error::CapacityExceeded { .. } => 3,
        Error::CertificateFailure { .. }
        | Error::ProtocolViolation(_)
        | Error::OracleGateViolation { .. } => 4,
        Error::EmptyFeasible(_) => 0,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let result = match cli.command {
        Command::Gen(a) => commands::gen(a),
        Command::Run(a) => commands::run(a),
        Command::Opt(a) => commands::opt(a),
        Command::Check(a) => commands::check(a),
        Command::Cert(a) => commands::cert(a),
    };
    match result {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(4),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
