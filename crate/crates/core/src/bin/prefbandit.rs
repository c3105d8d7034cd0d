fn main() {
    std::process::exit(prefbandit::harness::cli::run(std::env::args_os()));
}
