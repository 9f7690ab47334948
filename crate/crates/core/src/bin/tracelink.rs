fn main() {
    std::process::exit(tracelink::cli::main_with_args(std::env::args_os()));
}
