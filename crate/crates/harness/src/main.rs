use tornado_harness::cli::{self, Env};

fn main() {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = cli::run(std::env::args_os(), &Env::from_process(), &mut stdout.lock(), &mut stderr.lock());
    std::process::exit(code);
}
