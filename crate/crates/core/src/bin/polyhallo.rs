fn main() {
    std::process::exit(polyhallo::cli::run(std::env::args_os()));
}
