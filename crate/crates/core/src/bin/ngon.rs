fn main() {
    std::process::exit(ngon_core::cli::cli_run(std::env::args_os()));
}
