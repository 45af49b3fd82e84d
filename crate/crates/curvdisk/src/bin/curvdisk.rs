use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(curvdisk::cli::run())
}
