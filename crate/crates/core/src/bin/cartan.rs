fn main() {
    std::process::exit(cartan::cli::run_cli(std::env::args_os()));
}
