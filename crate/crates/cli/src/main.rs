use clap::Parser;

fn main() {
    let cli = momentgap_cli::args::Cli::parse();
    std::process::exit(momentgap_cli::run(cli));
}
