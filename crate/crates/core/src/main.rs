fn main() {
    std::process::exit(polytorus::cli::run(std::env::args_os()));
}
