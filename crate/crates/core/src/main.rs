fn main() {
    std::process::exit(integral_indicator::cli::cli_main(std::env::args_os()));
}
