fn main() {
    std::process::exit(palcanon::cli::run(std::env::args()));
}
