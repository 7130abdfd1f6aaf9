use clap::Parser;
use vpure_cli::{run_cli, Args};

fn main() {
    let args = Args::parse();
    match run_cli(&args) {
        Ok(report) => {
            for line in &report.outcome.summary {
                println!("{line}");
            }
            for f in &report.files {
                println!("wrote {}", f.display());
            }
        }
        Err(e) => {
            eprintln!("vpure: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
