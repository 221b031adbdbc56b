use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let out = driftgreen_cli::run(std::env::args_os());
    if !out.stdout.is_empty() {
        let mut stdout = std::io::stdout().lock();
        // A closed pipe is not worth a panic.
        let _ = stdout.write_all(out.stdout.as_bytes());
    }
    for line in &out.stderr {
        eprintln!("{line}");
    }
    ExitCode::from(out.exit)
}
