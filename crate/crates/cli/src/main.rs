fn main() {
    std::process::exit(biocs_cli::run(std::env::args_os()));
}
