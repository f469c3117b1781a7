fn main() {
    std::process::exit(dirreg_cli::main_with_args(std::env::args_os()));
}
