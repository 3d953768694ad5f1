use std::process::ExitCode;

fn main() -> ExitCode {
    let mut stderr = std::io::stderr();
    match hs_cli::run(std::env::args_os(), &mut stderr) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.kind.exit_code() as u8)
        }
    }
}
