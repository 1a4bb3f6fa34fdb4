fn main() {
    std::process::exit(formal_flow::cli::main_with_args(std::env::args_os()));
}
