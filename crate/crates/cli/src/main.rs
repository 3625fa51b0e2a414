fn main() {
    std::process::exit(tagnet_cli::run(std::env::args_os()));
}
