use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dequant_cli::parse::{parse_spin, parse_systems};
use dequant_cli::{run, Command, Format, JobSpec, PartitionMethod, SystemConfig};
use dequant_core::dequant::Metaplectic;
use dequant_core::opalg::SystemKind;
use dequant_core::pathint::TransferMode;

#[derive(Parser)]
#[command(
    name = "dequant",
    version,
    about = "De-quantize operators and evaluate coherent-state partition functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classical symbol of an operator expression.
    Dequantize {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        systems: Systems,
        #[arg(long, value_enum, default_value_t = Toggle::On)]
        metaplectic: Toggle,
    },
    /// Differential operator of a symbol in `z`, `zb`.
    Quantize {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        systems: Systems,
    },
    /// Partition function by exact trace, reduced sum or transfer matrix.
    Partition {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        systems: Systems,
        #[command(flatten)]
        numeric: Numeric,
        #[arg(long, value_enum, default_value_t = MethodArg::All)]
        method: MethodArg,
        #[arg(long, value_enum, default_value_t = ModeArg::MatrixElementExp)]
        mode: ModeArg,
        /// Largest boson index in the reduced sum (default: from the tail bound).
        #[arg(long)]
        cutoff: Option<u64>,
    },
    /// Every path-integral variant side by side.
    SlicingCompare {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        systems: Systems,
        #[command(flatten)]
        numeric: Numeric,
    },
    /// Cubic obstruction to a full quantization map.
    Gvh {
        #[command(flatten)]
        output: Output,
        /// Matrix truncation for the numerical residual check.
        #[arg(long, default_value_t = 30)]
        truncation: usize,
        #[arg(long, default_value_t = 6)]
        guard: usize,
    },
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    /// Write the report to FILE instead of standard output.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Common {
    /// Operator expression (a symbol in z, zb for quantize).
    #[arg(long)]
    expr: String,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct Systems {
    /// Kind of a single subsystem.
    #[arg(long, value_enum)]
    system: Option<SystemArg>,
    /// Spin label for unannotated `Sz`, e.g. 3/2.
    #[arg(long)]
    spin: Option<String>,
    /// Comma-separated subsystem list in kron order, e.g. `boson,spin:1`.
    #[arg(long, conflicts_with = "system")]
    systems: Option<String>,
}

#[derive(Args)]
struct Numeric {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    beta: f64,
    /// Real time T in tau = beta + iT.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    time: f64,
    /// Integral of the time profile; replaces T in the phase.
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
    /// Boson Fock truncation (default: boson degree + 40).
    #[arg(long)]
    truncation: Option<usize>,
    /// Slice counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    slices: Vec<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum SystemArg {
    Boson,
    Spin,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Exact,
    Reduced,
    Transfer,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    MatrixElementExp,
    MatrixElementLinear,
    NormalKernel,
    DiagonalKernel,
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {}", msg);
    ExitCode::from(1)
}

impl Systems {
    fn config(&self) -> Result<SystemConfig, String> {
        let spin = self.spin.as_deref().map(parse_spin).transpose()?;
        let systems = match (&self.systems, self.system) {
            (Some(list), _) => Some(parse_systems(list)?),
            (None, Some(SystemArg::Boson)) => Some(vec![SystemKind::Boson]),
            (None, Some(SystemArg::Spin)) => match spin {
                Some(s) => Some(vec![SystemKind::Spin(s)]),
                None => return Err("--system spin needs --spin".into()),
            },
            (None, None) => None,
        };
        Ok(SystemConfig { systems, spin })
    }
}

impl Output {
    fn apply(&self, job: &mut JobSpec) {
        job.format = match self.format {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
            FormatArg::Text => Format::Text,
        };
    }
}

impl Numeric {
    fn apply(&self, job: &mut JobSpec) {
        job.beta = self.beta;
        job.time = self.time;
        job.theta = self.theta;
        job.truncation = self.truncation;
        job.slices = self.slices.clone();
    }
}

fn build(cli: Cli) -> Result<(JobSpec, Option<PathBuf>), String> {
    let (mut job, out) = match cli.command {
        Cmd::Dequantize {
            common,
            systems,
            metaplectic,
        } => {
            let mut job = JobSpec::new(Command::Dequantize).with_expression(&common.expr);
            job.systems = systems.config()?;
            job.metaplectic = match metaplectic {
                Toggle::On => Metaplectic::On,
                Toggle::Off => Metaplectic::Off,
            };
            common.output.apply(&mut job);
            (job, common.output.out)
        }
        Cmd::Quantize { common, systems } => {
            let mut job = JobSpec::new(Command::Quantize).with_expression(&common.expr);
            job.systems = systems.config()?;
            common.output.apply(&mut job);
            (job, common.output.out)
        }
        Cmd::Partition {
            common,
            systems,
            numeric,
            method,
            mode,
            cutoff,
        } => {
            let mut job = JobSpec::new(Command::Partition).with_expression(&common.expr);
            job.systems = systems.config()?;
            numeric.apply(&mut job);
            job.method = match method {
                MethodArg::Exact => PartitionMethod::Exact,
                MethodArg::Reduced => PartitionMethod::Reduced,
                MethodArg::Transfer => PartitionMethod::Transfer,
                MethodArg::All => PartitionMethod::All,
            };
            job.mode = match mode {
                ModeArg::MatrixElementExp => TransferMode::MatrixElementExp,
                ModeArg::MatrixElementLinear => TransferMode::MatrixElementLinear,
                ModeArg::NormalKernel => TransferMode::NormalKernel,
                ModeArg::DiagonalKernel => TransferMode::DiagonalKernel,
            };
            job.cutoff = cutoff;
            common.output.apply(&mut job);
            (job, common.output.out)
        }
        Cmd::SlicingCompare {
            common,
            systems,
            numeric,
        } => {
            let mut job = JobSpec::new(Command::SlicingCompare).with_expression(&common.expr);
            job.systems = systems.config()?;
            numeric.apply(&mut job);
            common.output.apply(&mut job);
            (job, common.output.out)
        }
        Cmd::Gvh {
            output,
            truncation,
            guard,
        } => {
            let mut job = JobSpec::new(Command::Gvh);
            job.truncation = Some(truncation);
            job.guard = guard;
            output.apply(&mut job);
            (job, output.out)
        }
    };
    if job.slices.contains(&0) {
        return Err("--slices entries must be positive".into());
    }
    job.slices.dedup();
    Ok((job, out))
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("DEQUANT_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| format!("DEQUANT_THREADS must be a positive integer, got `{}`", raw))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = configure_threads() {
        return usage(e);
    }
    let (job, out) = match build(cli) {
        Ok(x) => x,
        Err(e) => return usage(e),
    };
    let outcome = run(&job);
    eprint!("{}", outcome.stderr);
    if !outcome.stdout.is_empty() {
        let written = match &out {
            Some(path) => std::fs::write(path, &outcome.stdout),
            None => std::io::stdout().write_all(outcome.stdout.as_bytes()),
        };
        if let Err(e) = written {
            return usage(format!("cannot write output: {}", e));
        }
    }
    ExitCode::from(outcome.code as u8)
}
