use clap::Parser;

/// Stateless HTTP service for the fractal explorer.
#[derive(Parser)]
#[command(version)]
struct Args {
    /// TCP port on 127.0.0.1.
    #[arg(long, default_value_t = explorerd::DEFAULT_PORT)]
    port: u16,
}

fn main() -> std::process::ExitCode {
    let args = Args::parse();
    match explorerd::run(args.port) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("explorerd: {e}");
            std::process::ExitCode::FAILURE
        }
    }
}
