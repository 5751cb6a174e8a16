//! Command implementations behind the `triple-helix` binary. Every command
//! returns the text it prints and the files it writes, so the binary only
//! parses arguments and routes output.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;
use triple_helix::contingency::{
    contingency_from_counts, distribution_from_table, share_series, CountField, CountRecord,
    NonePolicy,
};
use triple_helix::infotheory::{
    entropy, marginalize, pairwise_transmission, transmission3_entropy_form, Unit,
};
use triple_helix::ingest::{
    builtin_dataset, dataset_from_records, dataset_names, parse_count_csv, render_csv,
    render_percent_csv, render_series_csv, DatasetDescriptor,
};
use triple_helix::scanner::{load_corpus, scan_corpus, ScanMode, ScanSpec};
use triple_helix::synth::{regime_distribution, sample_population, RegimeSpec};
use triple_helix::timeseries::{
    moving_average, transmission_series, trend_summary, FLAT_TOLERANCE,
};

pub mod svg;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const COMPUTE_HEADER: &str = "year,h_u,h_i,h_g,t_ui,t_ug,t_ig,t_uig,unit";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Input {
        path: String,
        #[source]
        source: triple_helix::Error,
    },
    #[error(transparent)]
    Core(#[from] triple_helix::Error),
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, CliError>;

fn io_err(path: &Path, err: impl std::fmt::Display) -> CliError {
    CliError::Io {
        path: path.display().to_string(),
        message: err.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    pub none_policy: NonePolicy,
    pub unit: Unit,
    pub window: usize,
    pub trend_k: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            none_policy: NonePolicy::default(),
            unit: Unit::Millibit,
            window: 2,
            trend_k: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Input {
    Dataset(String),
    File(PathBuf),
}

pub fn load_input(input: &Input) -> Result<DatasetDescriptor> {
    match input {
        Input::Dataset(name) => Ok(builtin_dataset(name)?),
        Input::File(path) => {
            let shown = path.display().to_string();
            let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
            let wrap = |source| CliError::Input {
                path: shown.clone(),
                source,
            };
            let records = parse_count_csv(&text).map_err(wrap)?;
            let mut ds = dataset_from_records(&shown, records).map_err(wrap)?;
            ds.source = format!("count file {shown}");
            Ok(ds)
        }
    }
}

/// Written files, keyed by file name. Ordered so that listings are stable.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FileSet(pub BTreeMap<String, String>);

impl FileSet {
    fn add(&mut self, name: impl Into<String>, contents: String) {
        self.0.insert(name.into(), contents);
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.0.get(name).map(String::as_str)
    }

    /// Writes each file through a temporary sibling and a rename, so a
    /// reader never sees a half-written file.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        for (name, contents) in &self.0 {
            let target = dir.join(name);
            let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_err(dir, e))?;
            tmp.write_all(contents.as_bytes())
                .map_err(|e| io_err(&target, e))?;
            tmp.persist(&target).map_err(|e| io_err(&target, e.error))?;
        }
        Ok(())
    }
}

// compute

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComputeRow {
    pub year: i32,
    /// Hu, Hi, Hg, Tui, Tug, Tig, Tuig
    pub values: [f64; 7],
}

pub fn compute_rows(
    records: &[CountRecord],
    policy: NonePolicy,
    unit: Unit,
) -> Result<Vec<ComputeRow>> {
    let mut rows = records
        .iter()
        .map(|rec| {
            let table = contingency_from_counts(rec)?;
            let d = distribution_from_table(&table, policy)?;
            let bits = [
                entropy(&marginalize(&d, &[0])?).value,
                entropy(&marginalize(&d, &[1])?).value,
                entropy(&marginalize(&d, &[2])?).value,
                pairwise_transmission(&d, 0, 1)?.value,
                pairwise_transmission(&d, 0, 2)?.value,
                pairwise_transmission(&d, 1, 2)?.value,
                transmission3_entropy_form(&d)?.value,
            ];
            Ok(ComputeRow {
                year: rec.year,
                values: bits.map(|v| v * unit.per_bit()),
            })
        })
        .collect::<std::result::Result<Vec<_>, triple_helix::Error>>()?;
    rows.sort_by_key(|r| r.year);
    Ok(rows)
}

pub fn render_compute(rows: &[ComputeRow], unit: Unit) -> String {
    let mut out = String::from(COMPUTE_HEADER);
    out.push('\n');
    for row in rows {
        let _ = write!(out, "{}", row.year);
        for v in row.values {
            let _ = write!(out, ",{v:?}");
        }
        let _ = writeln!(out, ",{unit}");
    }
    out
}

pub fn compute_command(input: &Input, opts: &Options) -> Result<String> {
    let ds = load_input(input)?;
    let rows = compute_rows(&ds.records, opts.none_policy, opts.unit)?;
    Ok(render_compute(&rows, opts.unit))
}

// report

pub const SHARE_FIELDS: [CountField; 3] = [CountField::U, CountField::I, CountField::G];

pub fn build_report(ds: &DatasetDescriptor, opts: &Options) -> Result<FileSet> {
    let bits = transmission_series(&ds.records, opts.none_policy, Unit::Bit, &ds.name)?;
    let series = bits.to_unit(opts.unit);
    let smoothed = moving_average(&series, opts.window)?;
    // Direction is decided in bits so that it cannot depend on the display unit.
    let trend = trend_summary(&bits, opts.trend_k)?;

    let mut files = FileSet::default();
    files.add("series.csv", render_series_csv(series.points(), opts.unit));
    files.add(
        "smoothed.csv",
        render_series_csv(smoothed.points(), opts.unit),
    );
    files.add(
        "terms.csv",
        render_compute(
            &compute_rows(&ds.records, opts.none_policy, opts.unit)?,
            opts.unit,
        ),
    );

    let trend_json = serde_json::json!({
        "dataset": ds.name,
        "series": "series.csv",
        "none_policy": opts.none_policy,
        "unit": opts.unit,
        "k": trend.k,
        "early_mean": trend.early_mean * opts.unit.per_bit(),
        "late_mean": trend.late_mean * opts.unit.per_bit(),
        "direction": trend.direction.as_str(),
    });
    files.add(
        "trend.json",
        serde_json::to_string_pretty(&trend_json).expect("json values are finite") + "\n",
    );

    let unit_label = format!("T(uig), {}", opts.unit);
    files.add(
        "transmission.svg",
        svg::LineChart {
            title: format!("{} T(uig)", ds.name),
            y_label: unit_label,
            series: vec![
                svg::Series {
                    name: "yearly".into(),
                    points: series.points().to_vec(),
                },
                svg::Series {
                    name: format!("{}-year moving average", opts.window),
                    points: smoothed.points().to_vec(),
                },
            ],
        }
        .render(),
    );

    let mut share_lines = Vec::new();
    for (axis, field) in SHARE_FIELDS.into_iter().enumerate() {
        let share = share_series(&ds.records, field)?;
        files.add(
            format!("share_{field}.csv"),
            render_percent_csv(&share.points),
        );
        share_lines.push(svg::Series {
            name: ds.labels.get(axis).to_string(),
            points: share.points,
        });
    }
    files.add(
        "shares.svg",
        svg::LineChart {
            title: format!("{} share of total", ds.name),
            y_label: "percent".into(),
            series: share_lines,
        }
        .render(),
    );

    let names: Vec<String> = files.0.keys().cloned().collect();
    files.add("provenance.txt", provenance(ds, opts, &names));
    Ok(files)
}

fn provenance(ds: &DatasetDescriptor, opts: &Options, files: &[String]) -> String {
    let years: Vec<i32> = ds.records.iter().map(|r| r.year).collect();
    let span = match (years.iter().min(), years.iter().max()) {
        (Some(a), Some(b)) => format!("{a}-{b} ({} rows)", years.len()),
        _ => "none".into(),
    };
    let mut out = String::new();
    let _ = writeln!(out, "tool: triple-helix {VERSION}");
    let _ = writeln!(out, "dataset: {}", ds.name);
    let _ = writeln!(out, "source: {}", ds.source);
    let _ = writeln!(
        out,
        "labels: {}, {}, {}",
        ds.labels.get(0),
        ds.labels.get(1),
        ds.labels.get(2)
    );
    let _ = writeln!(out, "years: {span}");
    let _ = writeln!(out, "none_policy: {}", opts.none_policy);
    let _ = writeln!(out, "unit: {} ({} per bit)", opts.unit, opts.unit.per_bit());
    let _ = writeln!(
        out,
        "window: {} (each average is labelled with the last year of its window)",
        opts.window
    );
    let _ = writeln!(
        out,
        "trend_k: {} (mean of the last k yearly values against the first k, in bits; flat below {FLAT_TOLERANCE:e})",
        opts.trend_k
    );
    for c in &ds.caveats {
        let _ = writeln!(out, "caveat: {c}");
    }
    let _ = writeln!(out, "files: {}", files.join(", "));
    out
}

pub fn report_command(input: &Input, opts: &Options, out: &Path) -> Result<FileSet> {
    let ds = load_input(input)?;
    let files = build_report(&ds, opts)?;
    files.write_to(out)?;
    Ok(files)
}

// scan

pub fn scan_spec(mode: ScanMode, patterns: Option<Vec<String>>) -> Result<ScanSpec> {
    match patterns {
        None => Ok(ScanSpec::with_defaults(mode)),
        Some(p) => {
            let p: [String; 3] = p.try_into().map_err(|p: Vec<String>| {
                CliError::Usage(format!("expected exactly 3 patterns, got {}", p.len()))
            })?;
            Ok(ScanSpec::new(mode, p)?)
        }
    }
}

pub fn scan_command(dir: &Path, spec: &ScanSpec) -> Result<FileSet> {
    let docs = load_corpus(dir)?;
    let records = scan_corpus(&docs, spec)?;
    let rule = match spec.mode {
        ScanMode::FreeText => "case-insensitive whole-word match anywhere in the document body",
        ScanMode::TitleWords => "case-insensitive whole-word match in the title only",
        ScanMode::LinkDomains => "outbound link hostname ends with the suffix at a label boundary",
    };
    let mut prov = String::new();
    let _ = writeln!(prov, "tool: triple-helix {VERSION}");
    let _ = writeln!(prov, "corpus: {} ({} documents)", dir.display(), docs.len());
    let _ = writeln!(prov, "mode: {}", spec.mode);
    let _ = writeln!(prov, "patterns: {}", spec.patterns.join(", "));
    let _ = writeln!(prov, "matching: {rule}; one hit per document, no stemming");
    let _ = writeln!(
        prov,
        "years: sidecar .meta year, else YYYY_ filename prefix"
    );

    let mut files = FileSet::default();
    files.add("counts.csv", render_csv(&records));
    files.add("provenance.txt", prov);
    Ok(files)
}

// synth

#[derive(Debug, Clone, PartialEq)]
pub struct SynthOutput {
    pub record: CountRecord,
    /// `T(uig)` of the generating distribution, in bits.
    pub analytic_bits: f64,
    pub files: FileSet,
}

pub fn synth_command(spec: &RegimeSpec, unit: Unit) -> Result<SynthOutput> {
    let d = regime_distribution(spec)?;
    let analytic_bits = transmission3_entropy_form(&d)?.value;
    let record = sample_population(&d, spec.n, spec.seed)?;

    let mut prov = String::new();
    let _ = writeln!(prov, "tool: triple-helix {VERSION}");
    let _ = writeln!(prov, "regime: {}", spec.regime);
    let _ = writeln!(
        prov,
        "marginals: {:?}, {:?}, {:?}",
        spec.marginals[0], spec.marginals[1], spec.marginals[2]
    );
    let _ = writeln!(prov, "coupling: {:?}", spec.coupling);
    let _ = writeln!(prov, "n: {}", spec.n);
    let _ = writeln!(prov, "seed: {}", spec.seed);
    let _ = writeln!(
        prov,
        "analytic_t_uig: {:?} {unit}",
        analytic_bits * unit.per_bit()
    );

    let mut files = FileSet::default();
    files.add("counts.csv", render_csv(std::slice::from_ref(&record)));
    files.add("provenance.txt", prov);
    Ok(SynthOutput {
        record,
        analytic_bits,
        files,
    })
}

// datasets

pub fn datasets_command() -> String {
    let mut out = String::new();
    for name in dataset_names() {
        let ds = builtin_dataset(name).expect("listed fixtures load");
        let first = ds.records.first().map(|r| r.year).unwrap_or_default();
        let last = ds.records.last().map(|r| r.year).unwrap_or_default();
        let _ = writeln!(
            out,
            "{name}\t{first}-{last}\t{}, {}, {}\t{}",
            ds.labels.get(0),
            ds.labels.get(1),
            ds.labels.get(2),
            ds.source
        );
    }
    out
}
