fn main() {
    std::process::exit(biharmonic::run(std::env::args_os()));
}
