fn main() {
    std::process::exit(phasemap_cli::main_with_args(std::env::args_os()));
}
