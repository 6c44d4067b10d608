fn main() {
    std::process::exit(cwgldpc::cli::run_from(std::env::args_os()));
}
