fn main() {
    std::process::exit(pulsegauge::cli::run());
}
