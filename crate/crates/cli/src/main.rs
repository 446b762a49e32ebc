use std::process::ExitCode;

fn main() -> ExitCode {
    searchenv_cli::cli::main()
}
