//! Command-line entry point; see `feynmotic --help`.

use std::io::Write;

fn main() {
    let outcome = feynmotic::cli::run(std::env::args_os());
    let mut out = std::io::stdout().lock();
    // A closed pipe is not worth a panic; the exit code still reports success.
    let _ = out.write_all(outcome.output.as_bytes());
    let _ = out.flush();
    std::process::exit(outcome.code);
}
