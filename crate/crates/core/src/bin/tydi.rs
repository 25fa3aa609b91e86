fn main() {
    std::process::exit(tydi::cli::main_with_args(std::env::args_os()));
}
