fn main() {
    std::process::exit(hamlab_cli::run(std::env::args_os()));
}
