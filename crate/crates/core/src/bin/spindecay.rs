fn main() {
    std::process::exit(spindecay::cli::main_with_args(std::env::args_os()));
}
