fn main() {
    std::process::exit(ntk_equiv::cli::main_with_args(std::env::args_os()));
}
