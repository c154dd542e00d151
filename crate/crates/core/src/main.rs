fn main() {
    std::process::exit(surgekit::cli::run());
}
