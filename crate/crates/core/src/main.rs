fn main() {
    std::process::exit(champrec::cli::dispatch(std::env::args_os()));
}
