fn main() {
    std::process::exit(heun_hahn::cli::main_with_args(std::env::args_os()));
}
