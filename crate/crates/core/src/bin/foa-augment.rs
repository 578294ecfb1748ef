fn main() {
    std::process::exit(foa_augment::cli::run(std::env::args_os()));
}
