fn main() {
    std::process::exit(spikewise::cli::run());
}
