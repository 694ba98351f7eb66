fn main() {
    std::process::exit(primefeat::cli::main_with_args(std::env::args_os()));
}
