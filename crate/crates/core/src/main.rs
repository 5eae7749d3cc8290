fn main() {
    std::process::exit(setdyn::cli::main_with_args(std::env::args_os()));
}
