fn main() -> std::process::ExitCode {
    femtocoord::cli::run(std::env::args_os())
}
