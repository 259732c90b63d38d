fn main() {
    std::process::exit(juniward::cli::run(std::env::args_os()));
}
