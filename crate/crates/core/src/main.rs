fn main() {
    std::process::exit(lrwords::cli::run(std::env::args_os()));
}
