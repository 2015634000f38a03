use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(schur_dynamics::cli::run(std::env::args_os()))
}
