fn main() {
    env_logger::init();
    std::process::exit(szego_core::cli::main_with_args(std::env::args_os()));
}
