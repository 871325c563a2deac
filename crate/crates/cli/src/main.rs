fn main() {
    std::process::exit(shellstrain_cli::run(std::env::args_os()));
}
