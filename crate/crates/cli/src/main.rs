use clap::Parser;

fn main() {
    // clap exits with 2 on usage errors and 0 on --help/--version
    let cli = qnetlab_cli::Cli::parse();
    std::process::exit(qnetlab_cli::execute(&cli));
}
