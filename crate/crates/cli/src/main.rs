fn main() {
    std::process::exit(umrahguard_cli::run_command(std::env::args_os()));
}
