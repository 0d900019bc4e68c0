use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = affsurf_cli::parse_specs(std::env::args_os().skip(1)).and_then(|cfg| affsurf_cli::run(&cfg));
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("affsurf: {e}");
            ExitCode::from(e.code)
        }
    }
}
