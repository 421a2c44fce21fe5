use clap::Parser;
use relstandby_core::cli::{run, Cli, EXIT_USAGE};

fn main() {
    let cli = Cli::parse();
    if let Ok(v) = std::env::var("RELSTANDBY_THREADS") {
        match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    eprintln!("error: cannot size the thread pool: {e}");
                    std::process::exit(EXIT_USAGE);
                }
            }
            _ => {
                eprintln!("error: RELSTANDBY_THREADS = `{v}` is not a positive integer");
                std::process::exit(EXIT_USAGE);
            }
        }
    }
    let code = run(&cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
