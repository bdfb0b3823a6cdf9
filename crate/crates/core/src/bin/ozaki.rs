use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    if let Some(n) = std::env::var("OZAKI_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        // ignore failure: the global pool may already be initialized
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    let args: Vec<String> = std::env::args().skip(1).collect();
    let outcome = ozaki_core::cli::run(&args);
    print!("{}", outcome.stdout);
    let _ = std::io::stdout().flush();
    if !outcome.stderr.is_empty() {
        eprintln!("{}", outcome.stderr);
    }
    ExitCode::from(outcome.exit_code)
}
