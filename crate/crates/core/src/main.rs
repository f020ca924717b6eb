fn main() -> std::process::ExitCode {
    qecbound::cli::main_with_args(std::env::args_os())
}
