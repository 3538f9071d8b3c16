fn main() {
    std::process::exit(hardy_afd::cli::run(std::env::args_os()));
}
