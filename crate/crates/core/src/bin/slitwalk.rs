fn main() {
    std::process::exit(slitwalk::cli::main_with_args(std::env::args_os()));
}
