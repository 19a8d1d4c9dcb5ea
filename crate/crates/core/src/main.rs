use std::io::{self, IsTerminal};
use std::process::ExitCode;

fn main() -> ExitCode {
    let color = std::env::var("POSSUM_COLOR").map_or(true, |v| v != "never") && io::stderr().is_terminal();
    let stdin = io::stdin();
    let code = possum::cli::run_with_color(
        std::env::args_os(),
        &mut stdin.lock(),
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
        color,
    );
    ExitCode::from(code as u8)
}
