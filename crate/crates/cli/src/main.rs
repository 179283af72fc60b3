fn main() {
    std::process::exit(ptsusy_cli::run(std::env::args_os()));
}
