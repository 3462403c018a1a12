fn main() {
    std::process::exit(dc_split_cli::main_with_args(std::env::args_os()));
}
