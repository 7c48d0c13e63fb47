fn main() {
    let code = suspense_forge::cli::run(std::env::args());
    std::process::exit(code);
}
