fn main() {
    std::process::exit(meridian::cli::run(std::env::args_os()));
}
