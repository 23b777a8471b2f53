fn main() {
    std::process::exit(biped_lab::cli::run(std::env::args_os()));
}
