fn main() {
    std::process::exit(fht::cli::cli_main(std::env::args_os()));
}
