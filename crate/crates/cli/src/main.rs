use clap::Parser;
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let cli = snm_cli::Cli::parse();
    let started = Instant::now();
    match snm_cli::dispatch(&cli) {
        Ok(payload) => {
            let env = snm_cli::envelope(
                &args[1..].join(" "),
                started.elapsed().as_secs_f64(),
                payload,
            );
            println!("{env}");
        }
        Err(err) => {
            eprintln!(
                "{}",
                serde_json::json!({ "error": err.kind(), "message": err.message() })
            );
            std::process::exit(err.exit_code());
        }
    }
}
