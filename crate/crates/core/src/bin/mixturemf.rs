fn main() {
    std::process::exit(mixturemf::cli::main_from_args(std::env::args_os()));
}
