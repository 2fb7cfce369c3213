mod args;
mod commands;
mod error;
mod input;
mod output;

use clap::Parser;

fn main() {
    let cli = match args::Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            // a malformed command line is a parameter error; help and version are not errors
            std::process::exit(if err.use_stderr() { 3 } else { 0 });
        }
    };
    let result = commands::run(&cli).and_then(|bytes| output::emit(cli.out.as_deref(), &bytes));
    if let Err(err) = result {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
