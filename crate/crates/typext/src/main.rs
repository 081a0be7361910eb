fn main() {
    std::process::exit(typext::cli::run(std::env::args_os()));
}
