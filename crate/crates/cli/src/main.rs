use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(periodlab_cli::cli::run(std::env::args_os()))
}
