fn main() {
    std::process::exit(metafocus::cli::run(std::env::args_os()));
}
