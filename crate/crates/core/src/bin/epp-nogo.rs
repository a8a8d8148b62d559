fn main() {
    std::process::exit(epp_nogo::cli::run(std::env::args_os()));
}
