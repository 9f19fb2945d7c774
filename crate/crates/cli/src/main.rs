fn main() {
    std::process::exit(ratingprobit::run(std::env::args_os()));
}
