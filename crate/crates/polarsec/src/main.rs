fn main() {
    std::process::exit(polarsec::cli::run(std::env::args_os()));
}
