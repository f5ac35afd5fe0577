fn main() {
    std::process::exit(melons::cli::run());
}
