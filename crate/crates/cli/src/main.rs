fn main() {
    std::process::exit(lsd_cli::run(std::env::args_os()));
}
