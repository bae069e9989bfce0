use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(hodgevar::cli::main(std::env::args_os()))
}
