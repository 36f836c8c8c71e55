//! Operator command line. Mutating commands open the data directory
//! directly and hold its lock while they run, so they fail fast next to a
//! running service instead of racing it.
//!
//! Exit codes: 0 success, 1 usage (including unknown filter values and
//! report names), 2 validation failure (including malformed input
//! documents), 3 I/O, 4 store or service error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::analytics::{self, Dimension};
use crate::api::{self, parse_submission, Config};
use crate::ingestion::{import_csv, SequentialIds, SourceKind};
use crate::schema::{
    from_canonical_json, AccessTier, IncidentId, IncidentRecord, RecordView, SectorVocabulary, Validator,
};
use crate::store::{QueryFilter, ReviewAction, ReviewEvent, ReviewState, Store, StoreError};
use crate::taxonomy::{suggest_labels, Taxonomy};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_SERVICE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "cdi-registry", version, about = "AI incident registry for critical digital infrastructure")]
pub struct Cli {
    /// Store directory.
    #[arg(long, global = true, env = "REGISTRY_DATA_DIR", default_value = "registry-data")]
    pub data_dir: PathBuf,
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate canonical records (.json: one document, .jsonl: one per line).
    Validate { file: PathBuf },
    /// Map an AIID or AIAAIC CSV export onto canonical records.
    Import(ImportArgs),
    /// Submit canonical records for review.
    Submit { file: PathBuf },
    /// Claim, approve or reject a submitted incident.
    Review(ReviewArgs),
    /// Show one incident.
    Get {
        id: String,
        /// Unredacted, any state, with review history.
        #[arg(long)]
        reviewer: bool,
    },
    /// List incidents matching filters.
    Query(QueryArgs),
    /// Aggregate reports: harm_matrix, trend, or a field name.
    Stats(StatsArgs),
    /// Public JSON Lines export of published incidents.
    Export {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the taxonomy.
    Taxonomy,
    /// Suggest taxonomy labels for a free-text description.
    Suggest { text: String },
    /// Run the HTTP service.
    Serve {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct ImportArgs {
    #[arg(long)]
    pub source: SourceKind,
    pub csv: PathBuf,
    /// Canonical JSON Lines output. Defaults to the input name with a
    /// .jsonl extension.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the JSON mapping report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("action").required(true).args(["claim", "approve", "reject"])))]
pub struct ReviewArgs {
    pub id: String,
    #[arg(long)]
    pub claim: bool,
    #[arg(long)]
    pub approve: bool,
    #[arg(long)]
    pub reject: bool,
    #[arg(long)]
    pub reason: Option<String>,
    #[arg(long, default_value = "cli")]
    pub reviewer: String,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[arg(long = "sector")]
    pub sectors: Vec<String>,
    #[arg(long)]
    pub severity: Vec<String>,
    #[arg(long = "harm")]
    pub harms: Vec<String>,
    /// `category:label`
    #[arg(long = "label")]
    pub labels: Vec<String>,
    #[arg(long)]
    pub from: Option<String>,
    #[arg(long)]
    pub to: Option<String>,
    #[arg(long)]
    pub text: Option<String>,
    /// Review states to include (reviewer view only).
    #[arg(long = "state")]
    pub states: Vec<String>,
    /// Show every state, unredacted.
    #[arg(long)]
    pub reviewer: bool,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    pub report: String,
    #[arg(long)]
    pub field: Option<String>,
    #[arg(long)]
    pub value: Option<String>,
    /// Count submitted and under-review incidents too.
    #[arg(long)]
    pub include_pending: bool,
}

#[derive(Debug)]
struct Failure {
    exit: i32,
    code: String,
    message: String,
}

impl Failure {
    fn new(exit: i32, code: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            exit,
            code: code.into(),
            message: message.into(),
        }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Self::new(EXIT_IO, "IO_ERROR", format!("{}: {e}", path.display()))
    }
}

impl From<StoreError> for Failure {
    fn from(e: StoreError) -> Self {
        let exit = match &e {
            StoreError::Validation(_) => EXIT_VALIDATION,
            StoreError::Io(_) => EXIT_IO,
            StoreError::BadFilter(_) => EXIT_USAGE,
            _ => EXIT_SERVICE,
        };
        let mut message = e.to_string();
        if matches!(e, StoreError::Locked(_)) {
            message.push_str(" (is the service running?)");
        }
        Failure::new(exit, e.code(), message)
    }
}

type Out<'a> = &'a mut dyn Write;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: Out, stderr: Out) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                write!(stdout, "{e}")
            } else {
                write!(stderr, "{e}")
            };
            return e.exit_code().min(EXIT_USAGE);
        }
    };
    let json = cli.json;
    match execute(cli, stdout) {
        Ok(code) => code,
        Err(f) => {
            let _ = if json {
                writeln!(stderr, "{}", json!({"code": f.code, "message": f.message}))
            } else {
                writeln!(stderr, "error [{}]: {}", f.code, f.message)
            };
            f.exit
        }
    }
}

fn execute(cli: Cli, out: Out) -> Result<i32, Failure> {
    let json = cli.json;
    let dir = cli.data_dir;
    match cli.command {
        Command::Validate { file } => validate(&file, json, out),
        Command::Import(args) => import(args, json, out),
        Command::Submit { file } => submit(&dir, &file, json, out),
        Command::Review(args) => review(&dir, args, json, out),
        Command::Get { id, reviewer } => get(&dir, &id, reviewer, json, out),
        Command::Query(args) => query(&dir, args, json, out),
        Command::Stats(args) => stats(&dir, args, json, out),
        Command::Export { out: path } => export(&dir, path.as_deref(), out),
        Command::Taxonomy => {
            print(out, &serde_json::to_string_pretty(&Taxonomy::default()).expect("serializes"))?;
            Ok(EXIT_OK)
        }
        Command::Suggest { text } => {
            let s = suggest_labels(&text, &Taxonomy::default());
            if json {
                print_json(out, &s)?;
            } else {
                for x in s {
                    print(out, &format!("{:>2}  {}:{}", x.score, x.category, x.label))?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Serve { config } => serve(config.as_deref()),
    }
}

fn print(out: Out, line: &str) -> Result<(), Failure> {
    writeln!(out, "{line}").map_err(|e| Failure::new(EXIT_IO, "IO_ERROR", e.to_string()))
}

fn print_json<T: Serialize + ?Sized>(out: Out, value: &T) -> Result<(), Failure> {
    print(out, &serde_json::to_string(value).expect("serializes"))
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::io(path, e))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    std::fs::write(path, bytes).map_err(|e| Failure::io(path, e))
}

fn is_lines(path: &Path) -> bool {
    matches!(
        path.extension().and_then(|e| e.to_str()),
        Some("jsonl" | "ndjson")
    )
}

/// Splits a file into (1-based line or document number, bytes) documents.
fn documents(path: &Path, bytes: &[u8]) -> Vec<(usize, Vec<u8>)> {
    if is_lines(path) {
        bytes
            .split(|b| *b == b'\n')
            .enumerate()
            .filter(|(_, l)| !l.iter().all(u8::is_ascii_whitespace))
            .map(|(n, l)| (n + 1, l.to_vec()))
            .collect()
    } else {
        vec![(1, bytes.to_vec())]
    }
}

#[derive(Serialize)]
struct DocumentVerdict {
    document: usize,
    incident_id: Option<String>,
    valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<crate::report::ValidationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<serde_json::Value>,
}

fn validate(file: &Path, json: bool, out: Out) -> Result<i32, Failure> {
    let bytes = read(file)?;
    let taxonomy = Taxonomy::default();
    let sectors = SectorVocabulary::default();
    let validator = Validator::new(&taxonomy, &sectors);
    let mut verdicts = Vec::new();
    for (n, doc) in documents(file, &bytes) {
        verdicts.push(match from_canonical_json(&doc) {
            Ok(record) => {
                let report = validator.validate(&record);
                DocumentVerdict {
                    document: n,
                    incident_id: Some(record.incident_id),
                    valid: report.is_valid(),
                    report: Some(report),
                    error: None,
                }
            }
            Err(e) => DocumentVerdict {
                document: n,
                incident_id: None,
                valid: false,
                report: None,
                error: Some(json!({"code": e.code(), "message": e.to_string()})),
            },
        });
    }
    let all_valid = verdicts.iter().all(|v| v.valid);
    if json {
        print_json(out, &verdicts)?;
    } else {
        for v in &verdicts {
            let id = v.incident_id.as_deref().unwrap_or("-");
            let body = match (&v.report, &v.error) {
                (Some(r), _) => r.to_string(),
                (None, Some(e)) => format!("{} {}", e["code"].as_str().unwrap_or(""), e["message"].as_str().unwrap_or("")),
                (None, None) => String::new(),
            };
            print(out, &format!("{}:{} {id}: {}", file.display(), v.document, body.trim_end()))?;
        }
    }
    Ok(if all_valid { EXIT_OK } else { EXIT_VALIDATION })
}

fn import(args: ImportArgs, json: bool, out: Out) -> Result<i32, Failure> {
    let bytes = read(&args.csv)?;
    let run = import_csv(
        &bytes,
        args.source,
        &SequentialIds::default(),
        &Taxonomy::default(),
        &SectorVocabulary::default(),
    )
    .map_err(|e| Failure::new(EXIT_VALIDATION, e.code(), e.to_string()))?;
    let out_path = args.out.unwrap_or_else(|| args.csv.with_extension("jsonl"));
    write_file(&out_path, &run.to_jsonl())?;
    let report_json = serde_json::to_vec_pretty(&run.report).expect("serializes");
    if let Some(p) = &args.report {
        write_file(p, &report_json)?;
    }
    if json {
        print_json(out, &run.report)?;
    } else {
        let c = &run.report.coverage;
        print(
            out,
            &format!(
                "{} rows: {} mapped, {} errors, {} duplicate candidates; coverage {}/{}; wrote {}",
                run.report.per_record.len(),
                run.report.mapped(),
                run.report.errors(),
                run.report.duplicate_candidates.len(),
                c.derivable,
                c.total,
                out_path.display()
            ),
        )?;
        for r in &run.report.per_record {
            if let crate::ingestion::RecordReport::Error { source_id, code, message } = r {
                print(out, &format!("  {source_id}: {code} {message}"))?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn open_rw(dir: &Path) -> Result<Store, Failure> {
    Ok(Store::open(dir)?)
}

// A data directory that does not exist yet reads as an empty store.
fn open_ro(dir: &Path) -> Result<Store, Failure> {
    if !dir.exists() {
        return Ok(Store::in_memory());
    }
    Ok(Store::open_read_only(dir)?)
}

fn parse_id(raw: &str) -> Result<IncidentId, Failure> {
    raw.parse()
        .map_err(|e: String| Failure::new(EXIT_USAGE, "BAD_ID_FORMAT", e))
}

fn submit(dir: &Path, file: &Path, json: bool, out: Out) -> Result<i32, Failure> {
    let bytes = read(file)?;
    let store = open_rw(dir)?;
    let mut results = Vec::new();
    let mut failed = false;
    for (n, doc) in documents(file, &bytes) {
        let outcome = parse_submission(&doc)
            .map_err(|e| json!({"code": e.code(), "message": e.to_string()}))
            .and_then(|record| {
                store.submit(record).map_err(|e| {
                    json!({"code": e.code(), "message": e.to_string(), "violations": e.report().map(|r| r.violations())})
                })
            });
        match outcome {
            Ok(id) => results.push(json!({"document": n, "incident_id": id, "state": ReviewState::Submitted})),
            Err(err) => {
                failed = true;
                results.push(json!({"document": n, "error": err}));
            }
        }
    }
    store.checkpoint()?;
    if json {
        print_json(out, &results)?;
    } else {
        for r in &results {
            match r.get("incident_id") {
                Some(id) => print(out, &format!("{}:{} submitted as {}", file.display(), r["document"], id.as_str().unwrap_or("")))?,
                None => print(
                    out,
                    &format!(
                        "{}:{} rejected: {} {}",
                        file.display(),
                        r["document"],
                        r["error"]["code"].as_str().unwrap_or(""),
                        r["error"]["message"].as_str().unwrap_or("")
                    ),
                )?,
            }
        }
    }
    Ok(if failed { EXIT_VALIDATION } else { EXIT_OK })
}

fn review(dir: &Path, args: ReviewArgs, json: bool, out: Out) -> Result<i32, Failure> {
    let id = parse_id(&args.id)?;
    let action = if args.claim {
        ReviewAction::Claim
    } else if args.approve {
        ReviewAction::Approve
    } else {
        ReviewAction::Reject
    };
    let store = open_rw(dir)?;
    let mut event = ReviewEvent::new(id, action, args.reviewer);
    event.reason = args.reason;
    let state = store.review(id, event)?;
    store.checkpoint()?;
    if json {
        print_json(out, &json!({"incident_id": id, "state": state}))?;
    } else {
        print(out, &format!("{id} is now {state}"))?;
    }
    Ok(EXIT_OK)
}

fn get(dir: &Path, raw: &str, reviewer: bool, json: bool, out: Out) -> Result<i32, Failure> {
    let id = parse_id(raw)?;
    let store = open_ro(dir)?;
    if reviewer {
        let d = store.detail(id)?;
        if json {
            print_json(out, &d)?;
        } else {
            print(out, &serde_json::to_string_pretty(&d).expect("serializes"))?;
        }
    } else {
        let view = store.get(id, AccessTier::Public)?;
        if json {
            print(out, std::str::from_utf8(&view.to_json()).expect("utf-8"))?;
        } else {
            print(out, &serde_json::to_string_pretty(&view).expect("serializes"))?;
        }
    }
    Ok(EXIT_OK)
}

fn summary_line(v: &RecordView) -> String {
    let (date, severity, title) = match v {
        RecordView::Public(p) => (&p.incident_date, &p.incident_severity, &p.incident_title),
        RecordView::Full(r) => (&r.incident_date, &r.incident_severity, &r.incident_title),
    };
    format!(
        "{}  {}  {:<8}  {}",
        v.incident_id(),
        date.get(..10).unwrap_or(date),
        severity.as_deref().unwrap_or("-"),
        title
    )
}

fn query(dir: &Path, args: QueryArgs, json: bool, out: Out) -> Result<i32, Failure> {
    let filter = QueryFilter {
        sectors: args.sectors,
        severity: args.severity,
        harm_kinds: args.harms,
        date_from: args.from,
        date_to: args.to,
        taxonomy_labels: args.labels,
        text: args.text,
        states: args.states,
    };
    let tier = if args.reviewer {
        AccessTier::Reviewer
    } else {
        AccessTier::Public
    };
    let store = open_ro(dir)?;
    let views = store.query(&filter, tier)?;
    if json {
        print_json(out, &views)?;
    } else {
        for v in &views {
            print(out, &summary_line(v))?;
        }
    }
    Ok(EXIT_OK)
}

fn stats(dir: &Path, args: StatsArgs, json: bool, out: Out) -> Result<i32, Failure> {
    let store = open_ro(dir)?;
    let records: Vec<IncidentRecord> = if args.include_pending {
        store.records_in(&[ReviewState::Submitted, ReviewState::UnderReview, ReviewState::Published])
    } else {
        store.published()
    };
    let bad = |e: analytics::AnalyticsError| Failure::new(EXIT_USAGE, e.code(), e.to_string());
    match args.report.as_str() {
        "harm_matrix" | "harm_severity" => {
            let m = analytics::harm_severity_matrix(&records);
            if json {
                print_json(out, &m.to_table(records.len() as u64))?;
            } else {
                write!(out, "{}", m.to_csv()).map_err(|e| Failure::new(EXIT_IO, "IO_ERROR", e.to_string()))?;
            }
        }
        "trend" => {
            let (Some(field), Some(value)) = (args.field, args.value) else {
                return Err(Failure::new(EXIT_USAGE, "BAD_FILTER", "trend needs --field and --value"));
            };
            let series = analytics::monthly_trend(&records, &field, &value, store.taxonomy(), store.sectors())
                .map_err(bad)?;
            if json {
                print_json(out, &json!({"field": field, "value": value, "series": series}))?;
            } else {
                write!(out, "{}", analytics::trend_to_csv(&series))
                    .map_err(|e| Failure::new(EXIT_IO, "IO_ERROR", e.to_string()))?;
            }
        }
        dim => {
            let dim: Dimension = dim.parse().map_err(bad)?;
            let table = analytics::aggregate(&records, dim);
            if json {
                print_json(out, &table)?;
            } else {
                write!(out, "{}", table.to_csv()).map_err(|e| Failure::new(EXIT_IO, "IO_ERROR", e.to_string()))?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn export(dir: &Path, path: Option<&Path>, out: Out) -> Result<i32, Failure> {
    let store = open_ro(dir)?;
    let bytes = store.export_public();
    match path {
        Some(p) => write_file(p, &bytes)?,
        None => out
            .write_all(&bytes)
            .map_err(|e| Failure::new(EXIT_IO, "IO_ERROR", e.to_string()))?,
    }
    Ok(EXIT_OK)
}

fn serve(config: Option<&Path>) -> Result<i32, Failure> {
    let config = Config::load(config).map_err(|e| match e {
        api::ConfigError::Read { .. } => Failure::new(EXIT_IO, "IO_ERROR", e.to_string()),
        api::ConfigError::Invalid(_) => Failure::new(EXIT_USAGE, "BAD_CONFIG", e.to_string()),
    })?;
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| Failure::new(EXIT_SERVICE, "SERVICE_ERROR", e.to_string()))?;
    runtime
        .block_on(api::serve(config))
        .map_err(|e| Failure::new(EXIT_SERVICE, "SERVICE_ERROR", e.to_string()))?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("cdi-registry").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_1() {
        assert_eq!(run_args(&[]).0, EXIT_USAGE);
        assert_eq!(run_args(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["review", "CDI-000001"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["review", "CDI-000001", "--claim", "--approve"]).0, EXIT_USAGE);
        let (code, out, _) = run_args(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("validate"));
    }

    #[test]
    fn query_on_missing_store_is_empty() {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path().join("none");
        let (code, out, _) = run_args(&["--data-dir", d.to_str().unwrap(), "query", "--severity", "Critical", "--json"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(out.trim(), "[]");
        assert!(!d.exists());
    }

    #[test]
    fn missing_file_is_io_error() {
        let (code, _, err) = run_args(&["--json", "validate", "/nonexistent/x.json"]);
        assert_eq!(code, EXIT_IO);
        let v: serde_json::Value = serde_json::from_str(err.trim()).unwrap();
        assert_eq!(v["code"], "IO_ERROR");
    }
}
