fn main() {
    std::process::exit(sfp::cli::run(std::env::args_os()));
}
