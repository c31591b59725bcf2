fn main() {
    std::process::exit(vpair_cli::run(std::env::args_os()));
}
