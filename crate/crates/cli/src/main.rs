fn main() {
    std::process::exit(panelfact_cli::run(std::env::args_os()));
}
