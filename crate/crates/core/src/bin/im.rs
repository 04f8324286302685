fn main() {
    std::process::exit(im_core::cli::run(std::env::args_os().skip(1)));
}
