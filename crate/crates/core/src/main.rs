fn main() {
    std::process::exit(rrtower::cli::run(std::env::args_os()));
}
