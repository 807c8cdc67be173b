use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use turnwave::scenario::{render, run_config_file, verify};
use turnwave::TurnwaveError;

/// Turning and Rayleigh-Taylor breakdown experiments for Muskat and water-wave interfaces.
#[derive(Parser)]
#[command(name = "turnwave", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a scenario config file.
    Run {
        config: PathBuf,
        /// Override one key, e.g. `--set numerics.dt=5e-4`. Repeatable.
        #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
        set: Vec<String>,
        /// Output directory (overrides `output_dir`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the consistency of a trajectory directory.
    Verify { dir: PathBuf },
    /// Regenerate the SVG plots of a trajectory directory.
    Render { dir: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res: Result<(), TurnwaveError> = match cli.cmd {
        Cmd::Run { config, set, out } => run_config_file(&config, &set, out.as_deref()).map(|o| {
            for e in &o.events.events {
                println!("event {:?} t={:.9}", e.kind, e.t);
            }
            println!("artifacts in {}", o.dir.display());
        }),
        Cmd::Verify { dir } => verify(&dir).and_then(|rep| {
            for c in &rep.checks {
                println!("{} {}: {}", if c.pass { "ok  " } else { "FAIL" }, c.name, c.detail);
            }
            if rep.passed() {
                Ok(())
            } else {
                Err(TurnwaveError::VerifyFailed(format!("{}", dir.display())))
            }
        }),
        Cmd::Render { dir } => render(&dir).map(|paths| {
            for p in paths {
                println!("{}", p.display());
            }
        }),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
