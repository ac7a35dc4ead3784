use std::io;
use std::process::ExitCode;

use binsim::interface::cli::{run_cli, SEED_ENV};

fn main() -> ExitCode {
    let code = run_cli(
        std::env::args_os(),
        std::env::var(SEED_ENV).ok(),
        &mut io::stdout(),
        &mut io::stderr(),
    );
    ExitCode::from(code as u8)
}
