fn main() {
    std::process::exit(mtlab::cli::run(std::env::args_os()));
}
