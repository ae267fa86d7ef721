fn main() -> std::process::ExitCode {
    std::process::ExitCode::from(korovkin_lab_cli::main_with_args(std::env::args_os()))
}
