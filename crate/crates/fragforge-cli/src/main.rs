use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(fragforge_cli::run(std::env::args()) as u8)
}
