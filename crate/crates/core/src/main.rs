fn main() {
    std::process::exit(kbeta::cli::run(std::env::args_os()));
}
