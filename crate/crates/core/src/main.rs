fn main() {
    std::process::exit(numrad::cli::run(std::env::args_os()));
}
