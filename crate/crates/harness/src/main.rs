fn main() {
    std::process::exit(jagged_harness::cli::run(std::env::args_os()));
}
