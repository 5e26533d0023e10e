//! `emitnl` command-line front end.
//!
//! ```sh
//! emitnl dress configs/si.toml
//! emitnl expand configs/tls.toml --order 12 --recursion
//! emitnl effective configs/si.toml --out si.json
//! emitnl ensemble configs/tls.toml --n 10
//! emitnl validate configs/tls.toml --nscaling --out nscaling.csv
//! emitnl convert configs/units.toml
//! ```
//!
//! Tables go to standard output; `--out` writes the JSON or CSV form.
//! Exit status: 0 success, 2 configuration, 3 physics domain, 4 internal.

mod commands;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use emitnl::validation::{exit_code, EXIT_INTERNAL};

#[derive(Parser)]
#[command(
    name = "emitnl",
    version,
    about = "Effective field nonlinearities from driven emitters"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// System configuration (TOML, or JSON by extension).
    config: PathBuf,
    /// Write the machine-readable result here.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Dressed energies, dressing unitary and transformed interactions.
    Dress {
        #[command(flatten)]
        io: Common,
    },
    /// Ground-state expansion coefficients as normal-ordered term tables.
    Expand {
        #[command(flatten)]
        io: Common,
        /// Highest total order; the configured order by default.
        #[arg(long)]
        order: Option<u32>,
        /// Use the recursion (default; any order).
        #[arg(long, conflicts_with = "closed")]
        recursion: bool,
        /// Use the explicit sums (orders up to 4, zero diagonals).
        #[arg(long)]
        closed: bool,
    },
    /// Effective Hamiltonian, named nonlinearities and dissipators.
    Effective {
        #[command(flatten)]
        io: Common,
    },
    /// Collective expansion, scaling identity, coupling bounds and Kerr scaling.
    Ensemble {
        #[command(flatten)]
        io: Common,
        /// Number of emitters; the configured value by default.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Exact-diagonalization comparison, or truncation-error curves.
    Validate {
        #[command(flatten)]
        io: Common,
        /// Emit the two-level error curves as CSV.
        #[arg(long)]
        nscaling: bool,
    },
    /// Beam, coupling and susceptibility conversions.
    Convert {
        #[command(flatten)]
        io: Common,
    },
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let (output, out) = match cli.command {
        Command::Dress { io } => (commands::dress(&io.config)?, io.out),
        Command::Expand {
            io, order, closed, ..
        } => (commands::expand(&io.config, order, closed)?, io.out),
        Command::Effective { io } => (commands::effective(&io.config)?, io.out),
        Command::Ensemble { io, n } => (commands::ensemble(&io.config, n)?, io.out),
        Command::Validate { io, nscaling } => {
            let o = if nscaling {
                commands::nscaling(&io.config)?
            } else {
                commands::validate(&io.config)?
            };
            (o, io.out)
        }
        Command::Convert { io } => (commands::convert(&io.config)?, io.out),
    };
    output.emit(out.as_deref())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e
                .chain()
                .map(exit_code)
                .find(|&c| c != EXIT_INTERNAL)
                .unwrap_or(EXIT_INTERNAL);
            ExitCode::from(code as u8)
        }
    }
}
