use std::process::ExitCode;

fn main() -> ExitCode {
    probcoll::cli::run(std::env::args_os())
}
