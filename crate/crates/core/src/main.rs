use std::process::ExitCode;

fn main() -> ExitCode {
    mpcsim::harness::run_cli()
}
