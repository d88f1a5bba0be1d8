use clap::Parser;

fn main() {
    let cli = entcert::cli::Cli::parse();
    std::process::exit(entcert::cli::run(cli));
}
