use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(s2m::cli::run(std::env::args_os()))
}
