fn main() -> std::process::ExitCode {
    eqham::cli::main()
}
