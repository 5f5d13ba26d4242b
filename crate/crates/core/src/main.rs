fn main() {
    std::process::exit(dca::cli::run(std::env::args_os()));
}
