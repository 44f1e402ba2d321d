fn main() {
    std::process::exit(qpswf::cli::run(std::env::args_os()));
}
