fn main() {
    std::process::exit(persuaded_search::cli::run(std::env::args_os()));
}
