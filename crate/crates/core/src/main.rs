fn main() {
    std::process::exit(hartree::cli::run(std::env::args_os()));
}
