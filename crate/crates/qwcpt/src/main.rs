fn main() {
    std::process::exit(qwcpt::cli::run_cli(std::env::args_os()));
}
