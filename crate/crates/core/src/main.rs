use clap::Parser;

fn main() {
    let cli = dgelasto::cli::Cli::parse();
    std::process::exit(dgelasto::cli::execute(cli));
}
