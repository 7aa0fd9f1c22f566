fn main() {
    std::process::exit(string_damping::experiment::main_with_args(std::env::args_os()));
}
