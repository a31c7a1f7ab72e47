fn main() {
    std::process::exit(biasflip::cli::run(std::env::args_os()));
}
