use clap::Parser;

fn main() {
    let cli = oflow_cli::Cli::parse();
    if let Err(err) = oflow_cli::run(&cli) {
        eprintln!("error: {err}");
        std::process::exit(oflow_cli::exit_code(&err));
    }
}
