use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(quadriclab::cli::run(std::env::args_os()))
}
