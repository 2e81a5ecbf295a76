fn main() {
    let outcome = padiseq::cli::run(std::env::args());
    print!("{}", outcome.stdout);
    std::process::exit(outcome.exit_code);
}
