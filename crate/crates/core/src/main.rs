fn main() {
    std::process::exit(dimlab::cli::run_cli(std::env::args_os()));
}
