// Copyright 2026 The cloneforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! `cloneforge`: command-line front end for covariant qudit cloners.
//!
//! Exit codes:
//! - 0: success
//! - 1: verification failure
//! - 2: usage or input error
//! - 3: numerical-domain error

mod commands;
mod io;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "cloneforge",
    version,
    about = "Extremal covariant 1→2 qudit cloners"
)]
struct Cli {
    #[command(flatten)]
    shared: Shared,
    #[command(subcommand)]
    command: Command,
}

/// Flags accepted by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct Shared {
    /// Qudit dimension.
    #[arg(long, global = true)]
    pub d: Option<usize>,
    /// Numerical tolerance (default 1e-10 for verify/twirl, 1e-8 for optimize).
    #[arg(long, global = true, env = "CLONEFORGE_TOL")]
    pub tol: Option<f64>,
    /// Write the main artifact here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for randomized inputs.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Grid points per phase for torus ensembles.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Emit a cloner descriptor from a preset or a coefficient file.
    Gen {
        /// bb84, six-state, universal, fourier, cube, phase or multi-phase.
        #[arg(required_unless_present = "coeffs", conflicts_with = "coeffs")]
        preset: Option<String>,
        /// Existing descriptor to normalize and re-emit.
        #[arg(long)]
        coeffs: Option<PathBuf>,
        /// Clone-2 fidelity; the symmetric point when omitted.
        #[arg(long)]
        fb: Option<f64>,
    },
    /// Single-clone fidelities of a cloner on an ensemble.
    Eval {
        descriptor: PathBuf,
        ensemble: String,
    },
    /// Check trace preservation, covariance, extremality and strong covariance.
    Verify {
        #[arg(required_unless_present = "mix")]
        descriptor: Option<PathBuf>,
        /// Verify the mixture `w·R1 + (1−w)·R2` of two descriptors.
        #[arg(long, num_args = 3, value_names = ["F1", "F2", "W"], conflicts_with = "descriptor")]
        mix: Option<Vec<String>>,
    },
    /// Optimal cloners and trade-off curves.
    Optimize {
        ensemble: String,
        /// Symmetric optimum (the default mode).
        #[arg(long, group = "mode")]
        symmetric: bool,
        /// Maximize the clone-1 fidelity at this clone-2 fidelity.
        #[arg(long, group = "mode")]
        fb: Option<f64>,
        /// Scalarized sweep over this many evenly spaced weights.
        #[arg(long, group = "mode")]
        sweep: Option<usize>,
    },
    /// Group-average a Choi operator into a covariant one.
    Twirl {
        #[arg(required_unless_present = "random_channel")]
        input: Option<PathBuf>,
        /// Twirl a random trace-preserving channel drawn from this seed.
        #[arg(long, value_name = "SEED", conflicts_with = "input")]
        random_channel: Option<u64>,
    },
}

/// An error with its process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub const VERIFY: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const DOMAIN: u8 = 3;

    pub fn input(message: impl Into<String>) -> Self {
        CliError {
            code: Self::USAGE,
            message: message.into(),
        }
    }

    /// Maps a library error onto the usage/domain split.
    pub fn domain(e: cloneforge::Error) -> Self {
        use cloneforge::Error as E;
        let code = match e {
            E::Unknown { .. }
            | E::NotNormalized(_)
            | E::InvalidEnsemble(_)
            | E::NotSquare { .. } => Self::USAGE,
            _ => Self::DOMAIN,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<cloneforge::Error> for CliError {
    fn from(e: cloneforge::Error) -> Self {
        CliError::domain(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let shared = cli.shared;
    let result = match cli.command {
        Command::Gen { preset, coeffs, fb } => {
            commands::gen(&shared, preset.as_deref(), coeffs.as_deref(), fb)
        }
        Command::Eval {
            descriptor,
            ensemble,
        } => commands::eval(&shared, &descriptor, &ensemble),
        Command::Verify { descriptor, mix } => {
            commands::verify(&shared, descriptor.as_deref(), mix.as_deref())
        }
        Command::Optimize {
            ensemble,
            fb,
            sweep,
            ..
        } => commands::optimize(&shared, &ensemble, fb, sweep),
        Command::Twirl {
            input,
            random_channel,
        } => commands::twirl(&shared, input.as_deref(), random_channel),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("cloneforge: {e}");
            ExitCode::from(e.code)
        }
    }
}
