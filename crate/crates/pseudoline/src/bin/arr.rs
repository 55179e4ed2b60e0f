fn main() {
    std::process::exit(pseudoline::cli::run(std::env::args_os()));
}
