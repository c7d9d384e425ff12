fn main() -> std::process::ExitCode {
    smolyak::cli::main()
}
