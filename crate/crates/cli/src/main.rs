use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod config;

use commands::Failure;
use config::RunConfig;

/// Epstein zeta-functions of binary quadratic forms.
#[derive(Parser)]
#[command(name = "zeta-gaps", version)]
struct Cli {
    /// TOML run configuration (default: $ZETA_GAPS_CONFIG)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// write the report here instead of stdout
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate ζ_Q(s)
    Eval {
        /// coefficients a,b,c
        #[arg(long)]
        form: String,
        /// re,im
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        /// comma-separated: direct, theta, approx
        #[arg(long, default_value = "theta")]
        method: String,
        /// cutoff X of the approximate formula, or `auto` for t³
        #[arg(long = "X", default_value = "auto")]
        x: String,
        /// terms of the Dirichlet series
        #[arg(long)]
        n_max: Option<u64>,
    },
    /// Critical-line zeros by sign changes of W
    Zeros {
        #[arg(long, default_value = "1,0,1")]
        form: String,
        #[arg(long, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, allow_hyphen_values = true)]
        to: f64,
        /// grid step; default from the config or the form
        #[arg(long)]
        step: Option<f64>,
        /// append the gap-law table
        #[arg(long)]
        gaps: bool,
        /// laws e:c[:p] meaning c·T^e·(log T)^p (default 1/2, 5/11, 3/7 with c = 1)
        #[arg(long)]
        laws: Option<String>,
    },
    /// Exponential-sum reports
    Expsum {
        /// scenario file (JSON)
        #[arg(long, conflicts_with = "suite")]
        scenario: Option<PathBuf>,
        #[arg(long, value_enum)]
        suite: Option<Suite>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// largest m in the reorder and window checks
        #[arg(long)]
        m_max: Option<u64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Lemmas,
}

fn run(cli: Cli) -> Result<(String, Option<PathBuf>), Failure> {
    let mut cfg = RunConfig::resolve(cli.config.as_deref()).map_err(Failure::Usage)?;
    if cli.output.is_some() {
        cfg.output = cli.output;
    }
    let text = match cli.command {
        Command::Eval {
            form,
            s,
            method,
            x,
            n_max,
        } => {
            if let Some(n) = n_max {
                cfg.n_max = n;
            }
            let methods = commands::parse_methods(&method)?;
            let s = commands::parse_complex(&s)?;
            let x = commands::parse_x(&x)?;
            let form = commands::parse_form(&form)?;
            commands::eval(&cfg, form, s, &methods, &x)?
        }
        Command::Zeros {
            form,
            from,
            to,
            step,
            gaps,
            laws,
        } => {
            let laws = match (gaps, laws) {
                (_, Some(l)) => Some(commands::parse_laws(&l)?),
                (true, None) => Some(commands::default_laws()),
                (false, None) => None,
            };
            let form = commands::parse_form(&form)?;
            commands::zeros(&cfg, form, from, to, step, laws.as_deref())?
        }
        Command::Expsum {
            scenario,
            suite,
            trials,
            seed,
            m_max,
        } => {
            if let Some(t) = trials {
                cfg.trials = t;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(m) = m_max {
                cfg.m_max = m;
            }
            cfg.validate().map_err(Failure::Usage)?;
            match (scenario, suite) {
                (Some(path), None) => {
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
                    commands::expsum_scenario(&cfg, &text)?
                }
                (None, Some(Suite::Lemmas)) => commands::expsum_lemmas(&cfg)?,
                _ => return Err(Failure::Usage("expsum needs --scenario FILE or --suite lemmas".into())),
            }
        }
    };
    Ok((text, cfg.output))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok((text, None)) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Ok((text, Some(path))) => match std::fs::write(&path, text) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: cannot write {}: {e}", path.display());
                ExitCode::from(1)
            }
        },
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
