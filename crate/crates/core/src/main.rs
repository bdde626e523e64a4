fn main() {
    std::process::exit(extremal_spectra::cli::run(std::env::args_os()));
}
