fn main() {
    std::process::exit(subfrac::cli::run(std::env::args_os()));
}
