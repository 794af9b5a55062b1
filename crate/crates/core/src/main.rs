fn main() {
    std::process::exit(vecmeasure::cli::main_with_args(std::env::args_os()));
}
