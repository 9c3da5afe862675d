fn main() {
    std::process::exit(multiloop::cli::run(std::env::args_os()));
}
