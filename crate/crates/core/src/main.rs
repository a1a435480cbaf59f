fn main() { std::process::exit(hyperwave::cli::run(std::env::args_os())); }
