fn main() {
    std::process::exit(roughgg::cli::run(std::env::args_os()));
}
