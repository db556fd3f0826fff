use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ltlab::LtError;
use ltlab_cli::compute::compute;
use ltlab_cli::config::{Matrix, PolySpec, RunConfig};
use ltlab_cli::report::{EXIT_CLAIM, EXIT_CONFIG, EXIT_PASS, EXIT_PRECISION};
use ltlab_cli::run_suite;

#[derive(Parser)]
#[command(name = "ltlab", version, about = "Lubin-Tate formal groups, ramified Witt vectors and Dwork-type exponentials")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build one object (fg, log, exp, e_p, curly_e, witt, tower) and dump it.
    Compute {
        target: String,
        #[command(flatten)]
        over: Overrides,
        /// Print JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Run a suite (thm1, prop2, prop3, thm4, witt_axioms, all) and write a JSON report.
    Check {
        suite: String,
        #[command(flatten)]
        over: Overrides,
    },
}

#[derive(Args)]
struct Overrides {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    f: Option<u32>,
    /// Working precision in p-digits.
    #[arg(long = "N")]
    n_prec: Option<u32>,
    /// Series degree.
    #[arg(long = "D")]
    d: Option<usize>,
    /// Tower level.
    #[arg(long)]
    n: Option<usize>,
    /// canonical, multiplicative or random; applies to P.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Run only the configured field instead of the default case matrix.
    #[arg(long)]
    single: bool,
}

impl Overrides {
    fn load(&self) -> Result<RunConfig, LtError> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| LtError::Config(format!("{}: {e}", path.display())))?;
                RunConfig::from_json(&text)?
            }
            None => RunConfig::default(),
        };
        if let Some(p) = self.p {
            cfg.p = p;
        }
        if let Some(f) = self.f {
            cfg.f = f;
        }
        if self.n_prec.is_some() {
            cfg.n_prec = self.n_prec;
        }
        if let Some(d) = self.d {
            cfg.d_series = d;
        }
        if let Some(n) = self.n {
            cfg.levels = vec![n];
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(preset) = &self.preset {
            cfg.p_poly = match preset.as_str() {
                "random" => PolySpec::random(cfg.seed),
                other => PolySpec::Name(other.to_string()),
            };
        }
        if self.single {
            cfg.matrix = Matrix::Single;
        }
        if let Some(out) = &self.out {
            cfg.out = Some(out.display().to_string());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn error_exit(e: &LtError) -> ExitCode {
    eprintln!("error: {e}");
    let code = match e {
        LtError::Config(_) => EXIT_CONFIG,
        e if e.is_precision() => EXIT_PRECISION,
        _ => EXIT_CLAIM,
    };
    ExitCode::from(code as u8)
}

fn write_out(path: &Option<String>, text: &str) -> Result<(), LtError> {
    if let Some(path) = path {
        std::fs::write(path, text).map_err(|e| LtError::Config(format!("{path}: {e}")))?;
    }
    Ok(())
}

/// Write to stdout, ignoring a closed pipe (`ltlab ... | head`).
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Compute { target, over, json } => {
            let cfg = match over.load() {
                Ok(c) => c,
                Err(e) => return error_exit(&e),
            };
            match compute(&cfg, &target) {
                Ok(a) => {
                    let js = serde_json::to_string_pretty(&a.json).expect("artifact serializes");
                    if let Err(e) = write_out(&cfg.out, &js) {
                        return error_exit(&e);
                    }
                    emit(&format!("{}\n", if json { js } else { a.text }));
                    ExitCode::SUCCESS
                }
                Err(e) => error_exit(&e),
            }
        }
        Cmd::Check { suite, over } => {
            let cfg = match over.load() {
                Ok(c) => c,
                Err(e) => return error_exit(&e),
            };
            match run_suite(&cfg, &suite) {
                Ok(report) => {
                    if let Err(e) = write_out(&cfg.out, &report.to_json()) {
                        return error_exit(&e);
                    }
                    let code = report.exit_code();
                    let verdict = match code {
                        EXIT_PASS => "all claims pass",
                        EXIT_PRECISION => "some cases ran out of precision; raise N",
                        _ => "some claims fail",
                    };
                    emit(&format!("{}{verdict}\n", report.summary()));
                    ExitCode::from(code as u8)
                }
                Err(e) => error_exit(&e),
            }
        }
    }
}
