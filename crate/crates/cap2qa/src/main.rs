fn main() {
    std::process::exit(cap2qa::cli::run(std::env::args_os()));
}
