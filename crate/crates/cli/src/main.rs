use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use triple_helix::contingency::NonePolicy;
use triple_helix::infotheory::Unit;
use triple_helix::scanner::ScanMode;
use triple_helix::synth::{Regime, RegimeSpec};
use triple_helix_cli::{
    compute_command, datasets_command, report_command, scan_command, scan_spec, synth_command,
    CliError, Input, Options,
};

#[derive(Parser)]
#[command(
    name = "triple-helix",
    version,
    about = "Trivariate transmission T(uig) from overlapping hit counts"
)]
struct Cli {
    /// Whether documents matching none of the three terms are part of the
    /// event space (include) or probabilities are taken over the union (exclude).
    #[arg(long, global = true, default_value = "exclude")]
    none_policy: NonePolicy,
    /// Output unit: bit, millibit or nat.
    #[arg(long, global = true, default_value = "millibit")]
    unit: Unit,
    /// Moving-average window in years.
    #[arg(long, global = true, default_value_t = 2)]
    window: usize,
    /// Number of leading and trailing years compared by the trend summary.
    #[arg(long, global = true, default_value_t = 3)]
    trend_k: usize,
    /// Output directory. Required by `report`; optional elsewhere.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Random seed for `synth`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct InputArgs {
    /// Built-in dataset name (see `datasets`).
    #[arg(long)]
    dataset: Option<String>,
    /// Count CSV file with header year,u,i,g,ui,ug,ig,uig,total.
    #[arg(long)]
    input: Option<PathBuf>,
}

impl InputArgs {
    fn resolve(self) -> Input {
        match (self.dataset, self.input) {
            (Some(name), _) => Input::Dataset(name),
            (None, Some(path)) => Input::File(path),
            (None, None) => unreachable!("clap enforces one input"),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Per-year entropies, pairwise transmissions and T(uig).
    Compute(InputArgs),
    /// Write series, smoothed series, trend, shares, charts and provenance to --out.
    Report(InputArgs),
    /// Count term presence in a directory of documents and print a count CSV.
    ///
    /// A document's year comes from its sidecar `<file>.meta` (`year: YYYY`)
    /// or, failing that, a `YYYY_` file name prefix.
    Scan {
        dir: PathBuf,
        /// free-text, title-words or link-domains.
        #[arg(long, default_value = "free-text")]
        mode: ScanMode,
        /// Three comma-separated terms or domain suffixes.
        #[arg(long, value_delimiter = ',')]
        patterns: Option<Vec<String>>,
    },
    /// Sample a synthetic population and print its count CSV; the analytic
    /// T(uig) of the generating distribution goes to stderr.
    Synth {
        /// coordinated, uncoupled or bilateral.
        #[arg(long)]
        regime: Regime,
        /// One marginal for all axes, or three comma-separated.
        #[arg(long, value_delimiter = ',', default_value = "0.5")]
        p: Vec<f64>,
        /// Coupling strength in [0, 1].
        #[arg(long, default_value_t = 0.5)]
        c: f64,
        /// Population size.
        #[arg(long, default_value_t = 10_000)]
        n: u64,
    },
    /// List the built-in datasets.
    Datasets,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let opts = Options {
        none_policy: cli.none_policy,
        unit: cli.unit,
        window: cli.window,
        trend_k: cli.trend_k,
    };
    match cli.command {
        Command::Compute(input) => {
            let text = compute_command(&input.resolve(), &opts)?;
            if let Some(dir) = &cli.out {
                let mut files = triple_helix_cli::FileSet::default();
                files.0.insert("compute.csv".into(), text.clone());
                files.write_to(dir)?;
            }
            print!("{text}");
        }
        Command::Report(input) => {
            let out = cli
                .out
                .ok_or_else(|| CliError::Usage("report needs --out DIR".into()))?;
            let files = report_command(&input.resolve(), &opts, &out)?;
            for name in files.0.keys() {
                println!("{}", out.join(name).display());
            }
        }
        Command::Scan {
            dir,
            mode,
            patterns,
        } => {
            let files = scan_command(&dir, &scan_spec(mode, patterns)?)?;
            if let Some(out) = &cli.out {
                files.write_to(out)?;
            }
            print!("{}", files.get("counts.csv").unwrap_or_default());
        }
        Command::Synth { regime, p, c, n } => {
            let marginals = match p.as_slice() {
                [q] => [*q; 3],
                [a, b, g] => [*a, *b, *g],
                _ => {
                    return Err(CliError::Usage(format!(
                        "--p takes 1 or 3 values, got {}",
                        p.len()
                    )))
                }
            };
            let spec = RegimeSpec::new(regime, marginals, c, n, cli.seed)?;
            let out = synth_command(&spec, opts.unit)?;
            if let Some(dir) = &cli.out {
                out.files.write_to(dir)?;
            }
            print!("{}", out.files.get("counts.csv").unwrap_or_default());
            eprintln!(
                "analytic T(uig) = {:?} {}",
                out.analytic_bits * opts.unit.per_bit(),
                opts.unit
            );
        }
        Command::Datasets => print!("{}", datasets_command()),
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
