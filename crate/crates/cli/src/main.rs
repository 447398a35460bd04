use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = boa_cli::parse_args(std::env::args_os()).unwrap_or_else(|e| e.exit());
    let result = boa_cli::threads_from_env().and_then(|threads| boa_cli::execute(&cli, threads));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("boa: {e}");
            ExitCode::FAILURE
        }
    }
}
