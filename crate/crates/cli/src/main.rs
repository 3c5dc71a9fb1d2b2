fn main() {
    std::process::exit(rrlab::run(std::env::args()));
}
