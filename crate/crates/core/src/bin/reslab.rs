use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use reslab::cli::{default_output, exit_code, parse_config, run, Format, EXIT_CONFIG};

/// Runs one experiment described by a key=value config file.
#[derive(Parser, Debug)]
#[command(name = "reslab", version)]
struct Args {
    /// Config file (`-` for standard input).
    #[arg(long)]
    config: PathBuf,

    /// Report path; overrides `output_path` from the config.
    #[arg(long)]
    output: Option<PathBuf>,

    /// Report format; overrides `format` from the config.
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,

    /// Overrides `seed` from the config.
    #[arg(long)]
    seed: Option<u64>,

    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,

    /// Directory for reports when no output path is given.
    #[arg(long, env = "RESLAB_OUTPUT_DIR")]
    output_dir: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let text = if args.config.as_os_str() == "-" {
        std::io::read_to_string(std::io::stdin())
    } else {
        std::fs::read_to_string(&args.config)
    };
    let text = match text {
        Ok(t) => t,
        Err(e) => {
            eprintln!("reslab: cannot read {}: {e}", args.config.display());
            return ExitCode::from(reslab::cli::EXIT_IO as u8);
        }
    };
    let mut config = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("reslab: {}: {e}", args.config.display());
            return ExitCode::from(exit_code(&e) as u8);
        }
    };
    if let Some(f) = args.format {
        config.format = f.parse::<Format>().expect("restricted by clap");
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(out) = args.output {
        config.output_path = Some(out);
    } else if config.output_path.is_none() {
        if let Some(dir) = &args.output_dir {
            config.output_path = Some(default_output(dir, &config));
        }
    }
    if let Some(n) = args.threads {
        if n == 0 {
            eprintln!("reslab: --threads must be positive");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("reslab: {e}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    }
    ExitCode::from(run(&config) as u8)
}
