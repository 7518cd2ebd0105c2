fn main() {
    std::process::exit(gibbsbound::cli::dispatch(std::env::args_os()));
}
