use std::process::ExitCode;

fn main() -> ExitCode {
    let threads = match std::env::var("FLOQUET_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) => n,
            Err(_) => {
                eprintln!("error: FLOQUET_THREADS must be a non-negative integer, got '{v}'");
                return ExitCode::from(1);
            }
        },
        Err(_) => 0,
    };
    #[cfg(feature = "parallel")]
    let code = floquet::cli::run_with_threads(std::env::args_os(), threads);
    #[cfg(not(feature = "parallel"))]
    let code = {
        let _ = threads;
        floquet::cli::run(std::env::args_os())
    };
    ExitCode::from(code as u8)
}
