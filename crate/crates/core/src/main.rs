fn main() {
    std::process::exit(shapetensor::cli::run(std::env::args_os()));
}
