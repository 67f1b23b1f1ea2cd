fn main() {
    let code = wkra::cli::run(std::env::args_os());
    std::process::exit(code);
}
