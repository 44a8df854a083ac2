fn main() {
    std::process::exit(spinspec::cli::main_with_args(std::env::args_os()));
}
