use clap::Parser;

fn main() {
    let out = cubefold_cli::run(&cubefold_cli::Cli::parse());
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    std::process::exit(out.code);
}
