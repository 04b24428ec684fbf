fn main() {
    std::process::exit(citeburst::cli::run(std::env::args()));
}
