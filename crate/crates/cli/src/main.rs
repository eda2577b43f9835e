use clap::Parser;

fn main() {
    let cli = gecstrat::Cli::parse();
    if let Err(error) = gecstrat::run(cli) {
        eprint!("error: {error}");
        let mut source = std::error::Error::source(&error);
        while let Some(cause) = source {
            eprint!(": {cause}");
            source = cause.source();
        }
        eprintln!();
        std::process::exit(error.exit_code());
    }
}
