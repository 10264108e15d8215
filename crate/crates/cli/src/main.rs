use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use vlasov_cli::config::{self, Entry};
use vlasov_cli::{order, plot, run, CliError, RunConfig};

#[derive(Parser)]
#[command(name = "vlasov", version, about = "Hamiltonian splitting Vlasov-Maxwell solver (1D space, 2D velocity)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a case and write per-step diagnostics as CSV.
    Run {
        #[command(flatten)]
        common: CommonArgs,
        /// Also write the effective configuration to this file.
        #[arg(long, value_name = "PATH")]
        dump_config: Option<PathBuf>,
    },
    /// Measure the convergence order of a scheme over a ladder of steps.
    OrderStudy {
        #[command(flatten)]
        common: CommonArgs,
        /// Step sizes, largest first.
        #[arg(long, value_delimiter = ',', default_value = "0.2,0.1,0.05,0.025")]
        ladder: Vec<f64>,
        /// Final time of every run (overrides t_final).
        #[arg(long, default_value_t = 1.0)]
        t_final: f64,
    },
    /// Write a gnuplot script plotting one CSV column on a log scale.
    Plot {
        csv: PathBuf,
        quantity: String,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// Benchmark case: landau-strong, landau-linear, weibel, two-stream.
    #[arg(long)]
    case: Option<String>,
    /// Integrator: lie, strang, triple-jump, valis, mangeney.
    #[arg(long)]
    scheme: Option<String>,
    /// Config file of `key = value` lines.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override one key (repeatable), e.g. `--set dt=0.1`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output file (`-` for stdout); overrides output_path.
    #[arg(long, value_name = "PATH")]
    out: Option<String>,
}

impl CommonArgs {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut entries = Vec::new();
        let mut problems = Vec::new();
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            let (e, p) = config::parse_entries(&path.display().to_string(), &text);
            entries.extend(e);
            problems.extend(p);
        }
        let flag = |key: &str, value: &Option<String>| {
            value.as_ref().map(|v| Entry { origin: format!("--{key}"), key: key.into(), value: v.clone() })
        };
        entries.extend(flag("case", &self.case));
        entries.extend(flag("scheme", &self.scheme));
        for (i, s) in self.set.iter().enumerate() {
            match config::parse_override(i, s) {
                Ok(e) => entries.push(e),
                Err(p) => problems.push(p),
            }
        }
        entries.extend(flag("output_path", &self.out));
        Ok(config::build(entries, problems)?)
    }
}

fn open_output(path: &str) -> Result<Box<dyn Write>, CliError> {
    if path == "-" {
        Ok(Box::new(BufWriter::new(io::stdout().lock())))
    } else {
        let file = File::create(path).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
        Ok(Box::new(BufWriter::new(file)))
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("VLASOV_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("VLASOV_THREADS must be a non-negative integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot start thread pool: {e}")))
}

fn execute(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Run { common, dump_config } => {
            let cfg = common.resolve()?;
            if let Some(path) = dump_config {
                fs::write(&path, cfg.dump()).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            }
            let mut out = open_output(&cfg.output_path)?;
            run::run_to_writer(&cfg, &mut out)?;
        }
        Command::OrderStudy { common, ladder, t_final } => {
            let mut cfg = common.resolve()?;
            cfg.case.t_final = t_final;
            let rows = order::order_study(&cfg, &ladder)?;
            let mut out = open_output(&cfg.output_path)?;
            order::write_table(&rows, &mut out)?;
            out.flush()?;
        }
        Command::Plot { csv, quantity, out } => {
            let script = plot::emit_plot_script(&csv, &quantity)?;
            match out {
                Some(path) => write_file(&path, &script)?,
                None => print!("{script}"),
            }
        }
    }
    Ok(())
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
