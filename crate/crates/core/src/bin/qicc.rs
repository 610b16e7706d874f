use clap::Parser;

fn main() {
    let cli = qicc::cli::Cli::parse();
    std::process::exit(qicc::cli::run(cli));
}
