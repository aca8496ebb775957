use clap::Parser;

fn main() {
    let cli = rrdt_cli::Cli::parse();
    if let Err(e) = rrdt_cli::execute(cli) {
        eprintln!("error: {}", e.message());
        std::process::exit(e.exit_code());
    }
}
