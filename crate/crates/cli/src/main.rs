fn main() {
    std::process::exit(lowrank_cli::main_with_args(std::env::args_os()));
}
