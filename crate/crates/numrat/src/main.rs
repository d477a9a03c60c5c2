use clap::Parser;

fn main() {
    let cli = numrat::cli::Cli::parse();
    let code = match std::panic::catch_unwind(|| numrat::cli::execute(&cli)) {
        Ok(Ok(())) => 0,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
        Err(_) => {
            eprintln!("error: internal invariant breached");
            1
        }
    };
    std::process::exit(code);
}
