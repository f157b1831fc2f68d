use std::process::ExitCode;

fn main() -> ExitCode {
    meshspectra_cli::run(std::env::args_os())
}
