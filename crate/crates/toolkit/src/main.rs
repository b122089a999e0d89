fn main() {
    std::process::exit(nvk::cli::cli_main(std::env::args_os()));
}
