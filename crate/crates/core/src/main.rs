use clap::Parser;
use drsc::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    match run(&cli, |k| std::env::var(k).ok()) {
        Ok(names) => {
            for n in names {
                println!("{n}");
            }
        }
        Err(e) => {
            eprintln!("drsc: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
