use std::panic;
use std::process::ExitCode;

use clap::Parser;
use stabrad::cli::{configure_threads, exit_code, run, Cli};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    let result = panic::catch_unwind(|| {
        configure_threads()?;
        let stdout = std::io::stdout();
        let mut lock = stdout.lock();
        run(&cli, &argv, &mut lock)
    });
    match result {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(_) => {
            eprintln!("error: internal failure");
            ExitCode::from(70)
        }
    }
}
