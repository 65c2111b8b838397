fn main() {
    std::process::exit(pathlens::cli::run(std::env::args_os()));
}
