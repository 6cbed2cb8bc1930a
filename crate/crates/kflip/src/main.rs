fn main() {
    std::process::exit(kflip::cli::run_command(std::env::args().collect()));
}
