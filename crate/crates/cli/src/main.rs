fn main() {
    std::process::exit(funkmeans_cli::main_with_args(std::env::args_os()));
}
