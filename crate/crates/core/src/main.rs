fn main() {
    std::process::exit(geomphase::cli::main_with_args(std::env::args_os()));
}
