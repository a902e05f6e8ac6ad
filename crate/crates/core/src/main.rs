fn main() {
    std::process::exit(kfactor::cli::run(std::env::args_os()));
}
