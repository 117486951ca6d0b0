fn main() {
    std::process::exit(degmag_cli::app::main_with_args(std::env::args_os()));
}
