fn main() {
    std::process::exit(tamekernel_cli::main_with_stdio());
}
