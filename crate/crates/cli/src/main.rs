use clap::Parser;
use lowrank_cli::Cli;

fn main() {
    env_logger::init();
    let cli = Cli::parse();
    std::process::exit(lowrank_cli::run(&cli));
}
