fn main() {
    std::process::exit(nevgame::cli::main_with_args(std::env::args_os()));
}
