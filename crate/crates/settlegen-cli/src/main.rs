use clap::Parser;

mod commands;
mod render;

fn main() {
    let cli = commands::Cli::parse();
    std::process::exit(commands::run(cli));
}
