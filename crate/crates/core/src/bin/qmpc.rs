fn main() {
    std::process::exit(qmpc::cli::main_with_args(std::env::args_os()));
}
