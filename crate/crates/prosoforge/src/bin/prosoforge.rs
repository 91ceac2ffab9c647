fn main() {
    std::process::exit(prosoforge::cli::run());
}
