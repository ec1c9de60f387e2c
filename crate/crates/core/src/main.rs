use std::process::ExitCode;

fn main() -> ExitCode {
    cdcode::cli::main_with_args(std::env::args_os())
}
