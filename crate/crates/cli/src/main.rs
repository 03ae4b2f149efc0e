fn main() -> std::process::ExitCode {
    selmut_cli::app::main()
}
