fn main() {
    std::process::exit(dht::cli::run());
}
