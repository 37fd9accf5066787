// `!(x > 0.0)` style guards are intentional: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::process::ExitCode;

use clap::Parser;

use mtkcs::Error;

mod cli;

use cli::{commands, Cli, Command};

fn main() -> ExitCode {
    let args = Cli::parse();
    let outcome = match &args.command {
        Command::Constants(a) => commands::constants(&args, a),
        Command::Blowup(a) => commands::blowup(&args, a),
        Command::Check(a) => commands::check(&args, a),
        Command::Solve(a) => commands::solve_cmd(&args, a),
        Command::RayProfile(a) => commands::ray(&args, a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidParameter(_) | Error::Domain(_) | Error::UnsupportedOrder(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
