fn main() {
    std::process::exit(ranktwo::cli::run(std::env::args_os()));
}
