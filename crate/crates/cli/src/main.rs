use clap::Parser;

fn main() {
    std::process::exit(apf_cli::execute(apf_cli::Cli::parse()));
}
