fn main() {
    std::process::exit(latpoly_cli::run(std::env::args_os()));
}
