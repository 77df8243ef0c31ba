use clap::Parser;

fn main() {
    let cli = qmeasure_cli::Cli::parse();
    std::process::exit(qmeasure_cli::run(&cli));
}
