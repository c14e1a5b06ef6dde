fn main() {
    std::process::exit(resune::cli::execute(std::env::args_os()));
}
