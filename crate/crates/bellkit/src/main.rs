fn main() {
    std::process::exit(bellkit::cli::run(std::env::args_os()));
}
