fn main() {
    std::process::exit(straight::cli::run(std::env::args_os()));
}
