use std::process::ExitCode;

fn main() -> ExitCode {
    binopt::cli::main_with_args(std::env::args_os())
}
