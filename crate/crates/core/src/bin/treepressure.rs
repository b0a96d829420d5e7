use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use treepressure::cli::{run, Command, ExperimentConfig, RunOptions};

#[derive(Parser)]
#[command(name = "treepressure", about = "Pressure of tree shifts of finite type on restricted trees")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// JSON experiment config
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file (stdout when omitted)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for randomized oracle checks
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads for sweeps (0 = auto)
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Class, Perron value, period, residue table and eigenvectors of R
    Spectral,
    /// Per-depth pressure series as CSV
    Pressure,
    /// Limit estimates and bounds over a family of trees, as CSV
    Sweep,
    /// Compare the level recursion against brute-force enumeration
    OracleCheck,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    ExitCode::from(execute(&cli) as u8)
}

fn execute(cli: &Cli) -> i32 {
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("error: {}", e);
            return 1;
        }
    }
    let Some(path) = &cli.config else {
        eprintln!("error: --config <path> is required");
        return 1;
    };
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {}", path.display(), e);
            return 1;
        }
    };
    let command = match cli.command {
        Cmd::Spectral => Command::Spectral,
        Cmd::Pressure => Command::Pressure,
        Cmd::Sweep => Command::Sweep,
        Cmd::OracleCheck => Command::OracleCheck,
    };
    let result = ExperimentConfig::from_json(&text)
        .and_then(|config| run(command, &config, &RunOptions { seed: cli.seed, caps: None }));
    match result {
        Ok(out) => {
            match &cli.out {
                Some(p) => {
                    if let Err(e) = std::fs::write(p, &out.output) {
                        eprintln!("error: cannot write {}: {}", p.display(), e);
                        return 1;
                    }
                }
                None => print!("{}", out.output),
            }
            eprintln!("{}", out.echo);
            out.exit_code
        }
        Err(e) => {
            eprintln!("error: {}", e);
            e.exit_code()
        }
    }
}
