use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use vkg_patterns::classifier::{self, Assignment};
use vkg_patterns::engine::{detect_all, DetectOptions, HintsDocument};
use vkg_patterns::generator::OutputSet;
use vkg_patterns::ingest::{load_csv_dir, parse_obda, parse_schema_auto};
use vkg_patterns::model::{DataInstance, RelationalSchema};
use vkg_patterns::profiler::{profile, relations_with_data, Bounds};
use vkg_patterns::{Error, Result};

const DEFAULT_BASE_IRI: &str = "http://example.org/";

#[derive(Parser)]
#[command(name = "vkgpat", version, about = "Mapping patterns for virtual knowledge graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detect patterns and write mappings, ontology, summary, views and log.
    Bootstrap(BootstrapArgs),
    /// Profile the data and write the discovered constraints as JSON.
    Profile(ProfileArgs),
    /// Classify an OBDA mapping file and write assignments and a report.
    Classify(ClassifyArgs),
    /// Reformat an assignments JSON file as a coverage report.
    Report(ReportArgs),
}

#[derive(Args)]
struct Inputs {
    /// DDL script or JSON schema document.
    #[arg(long)]
    schema: PathBuf,
    /// Directory with one `<table>.csv` per table.
    #[arg(long)]
    data: Option<PathBuf>,
    /// JSON hints document.
    #[arg(long)]
    hints: Option<PathBuf>,
}

#[derive(Args)]
struct Tunables {
    /// Largest key size searched in the data.
    #[arg(long, default_value_t = 3)]
    max_arity: usize,
    /// Largest FD determinant searched in the data.
    #[arg(long, default_value_t = 2)]
    max_determinant: usize,
    /// Largest inclusion dependency arity searched in the data.
    #[arg(long, default_value_t = 2)]
    max_ind_arity: usize,
    /// Most distinct values a partitioning attribute may take.
    #[arg(long, default_value_t = 16)]
    max_values: usize,
    /// Detection rounds over cascading views before giving up.
    #[arg(long, default_value_t = 4)]
    max_rounds: usize,
}

impl Tunables {
    fn bounds(&self) -> Bounds {
        Bounds {
            max_key_arity: self.max_arity,
            max_fd_lhs: self.max_determinant,
            max_ind_arity: self.max_ind_arity,
            max_partition_values: self.max_values,
        }
    }

    fn options(&self, enumerate: bool) -> DetectOptions {
        DetectOptions {
            max_rounds: self.max_rounds,
            bounds: self.bounds(),
            enumerate,
        }
    }
}

#[derive(Args)]
struct BootstrapArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[arg(long, default_value = DEFAULT_BASE_IRI)]
    base_iri: String,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[command(flatten)]
    tunables: Tunables,
}

#[derive(Args)]
struct ProfileArgs {
    #[arg(long)]
    schema: PathBuf,
    #[arg(long)]
    data: PathBuf,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    tunables: Tunables,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    inputs: Inputs,
    /// OBDA mapping file to classify.
    #[arg(long)]
    mappings: PathBuf,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[command(flatten)]
    tunables: Tunables,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Args)]
struct ReportArgs {
    /// Assignments JSON written by `classify`.
    #[arg(long)]
    assignments: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path.display(), e))
}

fn write(path: &Path, body: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir.display(), e))?;
    }
    fs::write(path, body).map_err(|e| Error::io(path.display(), e))
}

fn emit(out: Option<&Path>, body: &str) -> Result<()> {
    match out {
        Some(p) => write(p, body),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "out".to_string(), |s| s.to_string_lossy().into_owned())
}

fn load_schema(path: &Path) -> Result<RelationalSchema> {
    parse_schema_auto(&read(path)?)
}

fn load_data(dir: Option<&Path>, schema: &RelationalSchema) -> Result<Option<DataInstance>> {
    let Some(dir) = dir else { return Ok(None) };
    let loaded = load_csv_dir(dir, schema)?;
    for w in &loaded.warnings {
        eprintln!("warning: {w}");
    }
    Ok(Some(loaded.instance))
}

fn load_hints(path: Option<&Path>) -> Result<HintsDocument> {
    match path {
        Some(p) => HintsDocument::parse(&read(p)?),
        None => Ok(HintsDocument::default()),
    }
}

fn bootstrap(a: &BootstrapArgs) -> Result<()> {
    let schema = load_schema(&a.inputs.schema)?;
    let data = load_data(a.inputs.data.as_deref(), &schema)?;
    let hints = load_hints(a.inputs.hints.as_deref())?;
    let result = detect_all(&schema, data.as_ref(), &hints, a.tunables.options(false))?;
    let outputs = OutputSet::build(&result, &hints, &a.base_iri)?;
    for p in outputs.write(&a.out, &stem(&a.inputs.schema))? {
        eprintln!("wrote {}", p.display());
    }
    Ok(())
}

fn profile_cmd(a: &ProfileArgs) -> Result<()> {
    let schema = load_schema(&a.schema)?;
    let data = load_data(Some(&a.data), &schema)?.unwrap_or_default();
    let relations = relations_with_data(&schema, &data, false);
    let constraints = profile(&schema, &relations, a.tunables.bounds(), &BTreeMap::new());
    emit(a.out.as_deref(), &constraints.to_json())
}

fn classify_cmd(a: &ClassifyArgs) -> Result<()> {
    let schema = load_schema(&a.inputs.schema)?;
    let data = load_data(a.inputs.data.as_deref(), &schema)?;
    let hints = load_hints(a.inputs.hints.as_deref())?;
    let doc = parse_obda(&read(&a.mappings)?)?;
    let c = classifier::classify(&doc, &schema, data.as_ref(), &hints, a.tunables.options(true))?;
    let name = stem(&a.mappings);
    let json = serde_json::to_string_pretty(&c.assignments).map_err(|e| Error::Serialization(e.to_string()))?;
    let files = [
        (format!("{name}.assignments.json"), json + "\n"),
        (format!("{name}.report.txt"), classifier::format_text(&c.report)),
        (format!("{name}.classify.log"), c.log.join("\n") + "\n"),
    ];
    for (file, body) in files {
        let path = a.out.join(file);
        write(&path, &body)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn report(a: &ReportArgs) -> Result<()> {
    let text = read(&a.assignments)?;
    let assignments: BTreeMap<String, Assignment> =
        serde_json::from_str(&text).map_err(|e| Error::Serialization(format!("{}: {e}", a.assignments.display())))?;
    let r = classifier::build_report(&assignments);
    let body = match a.format {
        Format::Text => classifier::format_text(&r),
        Format::Csv => classifier::format_csv(&r)?,
        Format::Json => classifier::format_json(&r)?,
    };
    emit(a.out.as_deref(), &body)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Bootstrap(a) => bootstrap(a),
        Command::Profile(a) => profile_cmd(a),
        Command::Classify(a) => classify_cmd(a),
        Command::Report(a) => report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::FixpointOverflow(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
