fn main() {
    std::process::exit(mcflow::cli::run(std::env::args_os()));
}
