use std::process::ExitCode;

fn main() -> ExitCode {
    opsplit::cli::main()
}
