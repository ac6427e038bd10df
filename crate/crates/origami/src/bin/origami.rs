fn main() {
    std::process::exit(origami::cli::run());
}
