fn main() {
    std::process::exit(automath::cli::run(std::env::args_os()));
}
