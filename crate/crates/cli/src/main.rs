use clap::{Parser, Subcommand};

use ctcsim_cli::commands::{
    cmd_check, cmd_enumerate, cmd_scenarios, cmd_solve, ModelArg, PolicyArg, SolveOptions,
};

/// Simulate quantum circuits threaded through closed timelike curves, under
/// the Deutsch consistency condition and the rival post-selection semantics.
#[derive(Parser)]
#[command(name = "ctcsim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a circuit file or built-in scenario and report the results
    Solve {
        /// Scenario name (see `scenarios`) or circuit file path
        input: String,
        /// Which semantics to run
        #[arg(long, value_enum, default_value_t = ModelArg::Both)]
        model: ModelArg,
        /// How to pick a fixed point when several exist
        #[arg(long, value_enum, default_value_t = PolicyArg::MaxEnt)]
        policy: PolicyArg,
        /// Solver residual target (trace norm)
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Emit the canonical JSON report instead of human-readable text
        #[arg(long)]
        json: bool,
    },
    /// Characterize the whole fixed-point set and the classical consistency table
    Enumerate {
        /// Scenario name or circuit file path
        input: String,
        /// Emit JSON instead of human-readable text
        #[arg(long)]
        json: bool,
    },
    /// Run the randomized property suite: CPTP validity, fixed-point
    /// existence, spectral/iterative solver agreement
    Check {
        /// RNG seed for instance generation
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Number of random instances
        #[arg(long, default_value_t = 200)]
        count: usize,
        /// Test hook: corrupt one channel to exercise the failure path
        #[arg(long, hide = true)]
        inject_defect: bool,
    },
    /// List the built-in scenarios
    Scenarios,
}

fn main() {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let code = match cli.command {
        Command::Solve {
            input,
            model,
            policy,
            tol,
            json,
        } => cmd_solve(
            &input,
            &SolveOptions {
                model,
                policy,
                tol,
                json,
            },
            &mut out,
        ),
        Command::Enumerate { input, json } => cmd_enumerate(&input, json, &mut out),
        Command::Check {
            seed,
            count,
            inject_defect,
        } => cmd_check(seed, count, inject_defect, &mut out),
        Command::Scenarios => cmd_scenarios(&mut out),
    };
    std::process::exit(code);
}
