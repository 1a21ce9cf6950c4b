fn main() {
    std::process::exit(ontomerge_cli::run(std::env::args_os()));
}
