fn main() {
    std::process::exit(salp::cli::main_with_args(std::env::args_os()));
}
