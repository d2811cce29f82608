fn main() {
    std::process::exit(relay_dmt::cli::run(std::env::args_os()));
}
