fn main() -> std::process::ExitCode {
    wmfcc::cli::main()
}
