//! `commlp`: rectangle-LP bounds, dual certificates, sampling scans and
//! protocol simulations from the command line.

mod bound;
mod certify;
mod protocol;
mod report;
mod scan;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "commlp", version, about = "LP lower bounds for communication complexity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build and solve a rectangle LP.
    Bound(bound::BoundArgs),
    /// Build or load a dual certificate and verify it.
    Certify(certify::CertifyArgs),
    /// Rectangle mass scan for the sampling lemma.
    Scan(scan::ScanArgs),
    /// Simulate a protocol and measure its worst-case success.
    Protocol(protocol::ProtocolArgs),
}

/// Outcome of a subcommand that ran to completion.
pub enum Status {
    Ok,
    /// Infeasible LP or failed verification.
    Failed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Bound(a) => bound::run(&a),
        Command::Certify(a) => certify::run(&a),
        Command::Scan(a) => scan::run(&a),
        Command::Protocol(a) => protocol::run(&a),
    };
    match result {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Failed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
