use std::process::ExitCode;

fn main() -> ExitCode {
    record_mle_cli::run(std::env::args_os())
}
