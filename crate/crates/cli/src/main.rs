fn main() {
    std::process::exit(zenolab_cli::run(std::env::args_os()));
}
