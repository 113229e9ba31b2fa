fn main() {
    std::process::exit(eprkit_cli::main_with_args(std::env::args_os()));
}
