use std::process::ExitCode;

fn main() -> ExitCode {
    vsi_tools::cli::main_with_args(std::env::args_os())
}
