fn main() {
    std::process::exit(phirho::cli::run(std::env::args_os()));
}
