fn main() -> std::process::ExitCode {
    robust_wac::cli::main()
}
