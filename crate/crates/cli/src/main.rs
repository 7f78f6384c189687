fn main() {
    std::process::exit(cvfid::cli::run(std::env::args_os()));
}
