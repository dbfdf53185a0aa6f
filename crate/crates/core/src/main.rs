fn main() {
    std::process::exit(setbranch::cli::run(std::env::args_os()));
}
