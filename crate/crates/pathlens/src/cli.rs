//! The `pathlens` command line.
//!
//! Exit codes: 0 success, 1 input or data error, 2 usage or configuration error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use pathlens_core::boost::{self, early_dropout_dataset, evaluate, TrainConfig, Variant};
use pathlens_core::ingest::{
    build_paths, generate_synthetic, label_cohorts, mixed_theme_structure, summarize_cohorts, CompletionThreshold,
    IssueKind, SynthConfig,
};
use pathlens_core::pathflow::{build_flow_network_by, per_step_rates, NodeId, NodeUnit};
use pathlens_core::stats::compare_cohort_rates;
use pathlens_core::themes::{catchup_theme_matrix, dropouts_by_last_theme, ThemeOptions};
use pathlens_core::{CohortLabel, CourseStructure, LearnerPath, Timestamp};
use serde::Serialize;
use serde_json::json;

use crate::emit::{
    comparison_to_json, emit_dot, network_from_json, network_to_json, theme_matrix_csv, theme_report_csv, to_json,
    RenderStyle,
};
use crate::io::{load_structure, parse_events, read_enrolled, structure_to_json, write_events};
use crate::manifest::{FileDigest, RunManifest};

/// Start of the built-in synthetic course run, 2017-01-02T00:00:00Z.
pub const DEFAULT_RUN_START: Timestamp = Timestamp(1_483_315_200);
pub const DEFAULT_WEEKS: u32 = 5;
pub const DEFAULT_STEPS_PER_WEEK: u32 = 8;

#[derive(Debug, Parser)]
#[command(name = "pathlens", version, about = "Learner path analysis over course clickstreams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a seeded synthetic event log.
    Synth(SynthArgs),
    /// Validate an event log and summarize cohorts.
    Ingest(IngestArgs),
    /// Build a step- or block-level flow network.
    Flow(FlowArgs),
    /// Dropouts by last theme and the catch-up theme matrix.
    Themes(ThemesArgs),
    /// Paired completer-vs-dropout tests on per-step rates.
    Stats(StatsArgs),
    /// Cross-validated early-dropout prediction.
    Predict(PredictArgs),
    /// Render a network JSON file as DOT.
    Render(RenderArgs),
}

#[derive(Debug, Args)]
struct DataArgs {
    /// Event log CSV.
    #[arg(long)]
    events: PathBuf,
    /// Course structure JSON.
    #[arg(long)]
    structure: PathBuf,
    /// Newline-delimited enrolled learner ids; defaults to the ids in the log.
    #[arg(long)]
    enrolled: Option<PathBuf>,
    /// Fraction of steps a completer must have accessed.
    #[arg(long)]
    threshold: Option<f64>,
    /// Fail on the first malformed row instead of skipping it.
    #[arg(long)]
    strict: bool,
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// Generator configuration JSON.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Course structure JSON; defaults to a built-in 40-step mixed-theme course.
    #[arg(long)]
    structure: Option<PathBuf>,
    /// Also write the structure used.
    #[arg(long)]
    structure_out: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct IngestArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CohortArg {
    Completer,
    Dropout,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GranularityArg {
    Fisheye,
    Birdeye,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Dot,
    Json,
}

#[derive(Debug, Args)]
struct FlowArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, value_enum, default_value = "all")]
    cohort: CohortArg,
    #[arg(long, value_enum, default_value = "fisheye")]
    granularity: GranularityArg,
    /// Group consecutive steps into blocks of this size instead of weeks.
    #[arg(long)]
    block_size: Option<u32>,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    /// Render style JSON for DOT output.
    #[arg(long)]
    style: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ThemesArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Fold review and feedback steps into assignment.
    #[arg(long)]
    merge_assessment: bool,
    /// Count completers' catch-up hops in the matrix too.
    #[arg(long)]
    include_completers: bool,
    /// Dropout-by-theme CSV.
    #[arg(long)]
    out: PathBuf,
    /// Theme matrix CSV; defaults to `<out stem>.matrix.csv`.
    #[arg(long)]
    matrix_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    /// First-order gradient boosting.
    Gbm,
    /// Second-order regularized boosting.
    Xgb,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Gbm => Variant::FirstOrder,
            VariantArg::Xgb => Variant::SecondOrder,
        }
    }
}

#[derive(Debug, Args)]
struct PredictArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, value_enum, default_value = "xgb")]
    variant: VariantArg,
    /// Training configuration JSON.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the configured cross-validation seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the configured early window fraction.
    #[arg(long)]
    window_fraction: Option<f64>,
    /// Accuracy report JSON.
    #[arg(long)]
    out: PathBuf,
    /// Model trained on all learners; defaults to `<out stem>.model.json`.
    #[arg(long)]
    model_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RenderArgs {
    /// Network JSON written by `flow --format json`.
    #[arg(long)]
    network: PathBuf,
    #[arg(long)]
    structure: PathBuf,
    /// Block size the network was built with, for block networks.
    #[arg(long)]
    block_size: Option<u32>,
    #[arg(long)]
    style: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or configuration; exit 2.
    Config(String),
    /// Unreadable, malformed or unusable input data; exit 1.
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Data(_) => 1,
            CliError::Config(_) => 2,
        }
    }
}

impl Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) | CliError::Data(m) => f.write_str(m),
        }
    }
}

fn data_err(context: impl Display) -> impl FnOnce(&dyn Display) -> CliError {
    move |e| CliError::Data(format!("{context}: {e}"))
}

fn config_err(context: impl Display) -> impl FnOnce(&dyn Display) -> CliError {
    move |e| CliError::Config(format!("{context}: {e}"))
}

/// Tracks inputs and outputs for the manifest.
struct Run {
    manifest: RunManifest,
}

impl Run {
    fn new(command: &str) -> Run {
        Run {
            manifest: RunManifest::new(command),
        }
    }

    fn read(&mut self, role: &str, path: &Path) -> Result<Vec<u8>, CliError> {
        let bytes = fs::read(path).map_err(|e| data_err(format!("cannot read {}", path.display()))(&e))?;
        self.manifest
            .inputs
            .insert(role.to_owned(), FileDigest::of(path, &bytes));
        Ok(bytes)
    }

    fn write(&mut self, role: &str, path: &Path, contents: &[u8]) -> Result<(), CliError> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| data_err(format!("cannot create {}", dir.display()))(&e))?;
        }
        fs::write(path, contents).map_err(|e| data_err(format!("cannot write {}", path.display()))(&e))?;
        self.manifest
            .outputs
            .insert(role.to_owned(), FileDigest::of(path, contents));
        Ok(())
    }

    fn config<T: Serialize>(&mut self, value: &T) {
        self.manifest.config = serde_json::to_value(value).expect("config serializes");
    }

    fn finish(self, primary_out: &Path) -> Result<(), CliError> {
        let path = RunManifest::path_for(primary_out);
        let text = to_json(&self.manifest);
        fs::write(&path, text).map_err(|e| data_err(format!("cannot write {}", path.display()))(&e))
    }
}

fn read_json<T: serde::de::DeserializeOwned>(run: &mut Run, role: &str, path: &Path) -> Result<T, CliError> {
    let bytes = run.read(role, path)?;
    serde_json::from_slice(&bytes).map_err(|e| config_err(format!("invalid {role} file {}", path.display()))(&e))
}

struct Dataset {
    structure: CourseStructure,
    paths: BTreeMap<String, LearnerPath>,
    labels: BTreeMap<String, CohortLabel>,
    n_events: usize,
    row_errors: Vec<String>,
    issues: Vec<String>,
    threshold: CompletionThreshold,
}

impl Dataset {
    fn cohort(&self, label: CohortLabel) -> impl Iterator<Item = &LearnerPath> {
        self.paths
            .iter()
            .filter(move |(id, _)| self.labels.get(*id) == Some(&label))
            .map(|(_, p)| p)
    }
}

fn describe_issue(kind: IssueKind) -> String {
    match kind {
        IssueKind::MissingLearner => "missing learner id, skipped".into(),
        IssueKind::UnknownStep => "step not in course, skipped".into(),
        IssueKind::OutsideRun => "timestamp outside the run, skipped".into(),
        IssueKind::ThemeMismatch { event, course } => {
            format!("theme {event} disagrees with course theme {course}, kept {course}")
        }
    }
}

fn load_dataset(run: &mut Run, args: &DataArgs) -> Result<Dataset, CliError> {
    let threshold = match args.threshold {
        Some(t) => CompletionThreshold::new(t).map_err(|e| config_err("--threshold")(&e))?,
        None => CompletionThreshold::DEFAULT,
    };
    let structure_bytes = run.read("structure", &args.structure)?;
    let structure = load_structure(&structure_bytes[..])
        .map_err(|e| data_err(format!("structure {}", args.structure.display()))(&e))?;
    let events_bytes = run.read("events", &args.events)?;
    let parsed = parse_events(&events_bytes[..], args.strict)
        .map_err(|e| data_err(format!("events {}", args.events.display()))(&e))?;
    let row_errors: Vec<String> = parsed.errors.iter().map(ToString::to_string).collect();
    for e in &row_errors {
        eprintln!("warning: {}: {e}", args.events.display());
    }
    let set = build_paths(&parsed.events, &structure);
    let issues: Vec<String> = set
        .issues
        .iter()
        .map(|i| {
            format!(
                "event {} ({}, {}): {}",
                i.index,
                i.learner_id,
                i.step,
                describe_issue(i.kind)
            )
        })
        .collect();
    let enrolled = match &args.enrolled {
        Some(path) => {
            let bytes = run.read("enrolled", path)?;
            read_enrolled(&bytes[..]).map_err(|e| data_err(format!("enrolled {}", path.display()))(&e))?
        }
        None => Vec::new(),
    };
    let labels = label_cohorts(&set.paths, enrolled.iter().map(String::as_str), &structure, threshold);
    Ok(Dataset {
        structure,
        paths: set.paths,
        labels,
        n_events: parsed.events.len(),
        row_errors,
        issues,
        threshold,
    })
}

fn load_style(run: &mut Run, path: Option<&Path>) -> Result<RenderStyle, CliError> {
    let style: RenderStyle = match path {
        Some(p) => read_json(run, "style", p)?,
        None => RenderStyle::default(),
    };
    style.validate().map_err(|e| config_err("style")(&e))?;
    Ok(style)
}

fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    out.with_file_name(format!("{stem}.{suffix}"))
}

fn node_unit(granularity: GranularityArg, block_size: Option<u32>) -> Result<NodeUnit, CliError> {
    match (granularity, block_size) {
        (GranularityArg::Fisheye, None) => Ok(NodeUnit::Step),
        (GranularityArg::Fisheye, Some(_)) => {
            Err(CliError::Config("--block-size requires --granularity birdeye".into()))
        }
        (GranularityArg::Birdeye, None) => Ok(NodeUnit::Week),
        (GranularityArg::Birdeye, Some(k)) => NodeUnit::blocks(k).map_err(|e| config_err("--block-size")(&e)),
    }
}

fn synth(args: SynthArgs) -> Result<(), CliError> {
    let mut run = Run::new("synth");
    let mut config: SynthConfig = match &args.config {
        Some(p) => read_json(&mut run, "config", p)?,
        None => SynthConfig::default(),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    config.validate().map_err(|e| config_err("synth config")(&e))?;
    let structure = match &args.structure {
        Some(p) => {
            let bytes = run.read("structure", p)?;
            load_structure(&bytes[..]).map_err(|e| data_err(format!("structure {}", p.display()))(&e))?
        }
        None => mixed_theme_structure("synthetic", DEFAULT_WEEKS, DEFAULT_STEPS_PER_WEEK, DEFAULT_RUN_START)
            .expect("built-in structure is valid"),
    };
    let events = generate_synthetic(&config, &structure).map_err(|e| config_err("synth config")(&e))?;
    let mut csv = Vec::new();
    write_events(&mut csv, &events).map_err(|e| data_err("writing events")(&e))?;
    run.write("events", &args.out, &csv)?;
    if let Some(p) = &args.structure_out {
        run.write("structure", p, structure_to_json(&structure).as_bytes())?;
    }
    run.config(&config);
    run.manifest.seeds.insert("synth".into(), config.seed);
    run.finish(&args.out)
}

fn ingest(args: IngestArgs) -> Result<(), CliError> {
    let mut run = Run::new("ingest");
    let data = load_dataset(&mut run, &args.data)?;
    let summary = json!({
        "run_label": data.structure.run_label(),
        "steps": data.structure.len(),
        "events": data.n_events,
        "learners": data.paths.len(),
        "cohorts": summarize_cohorts(&data.labels),
        "row_errors": data.row_errors,
        "issues": data.issues,
    });
    run.write("summary", &args.out, to_json(&summary).as_bytes())?;
    run.config(&json!({ "completion_threshold": data.threshold, "strict": args.data.strict }));
    run.finish(&args.out)
}

fn flow(args: FlowArgs) -> Result<(), CliError> {
    let mut run = Run::new("flow");
    let unit = node_unit(args.granularity, args.block_size)?;
    let style = match args.format {
        FormatArg::Dot => Some(load_style(&mut run, args.style.as_deref())?),
        FormatArg::Json => None,
    };
    let data = load_dataset(&mut run, &args.data)?;
    let members: Vec<&LearnerPath> = match args.cohort {
        CohortArg::Completer => data.cohort(CohortLabel::Completer).collect(),
        CohortArg::Dropout => data.cohort(CohortLabel::Dropout).collect(),
        CohortArg::All => data.paths.values().collect(),
    };
    let network = build_flow_network_by(members, &data.structure, unit).map_err(|e| data_err("flow network")(&e))?;
    let text = match style {
        Some(style) => emit_dot(&network, &network.node_themes(&data.structure, unit), &style),
        None => network_to_json(&network),
    };
    run.write("network", &args.out, text.as_bytes())?;
    run.config(&json!({
        "cohort": format!("{:?}", args.cohort).to_lowercase(),
        "granularity": network.granularity.as_str(),
        "block_size": args.block_size,
        "format": format!("{:?}", args.format).to_lowercase(),
        "completion_threshold": data.threshold,
    }));
    run.finish(&args.out)
}

fn themes(args: ThemesArgs) -> Result<(), CliError> {
    let mut run = Run::new("themes");
    let data = load_dataset(&mut run, &args.data)?;
    let options = ThemeOptions {
        merge_assessment: args.merge_assessment,
    };
    let report = dropouts_by_last_theme(data.cohort(CohortLabel::Dropout), &data.structure, options)
        .map_err(|e| data_err("theme report")(&e))?;
    let matrix_paths: Vec<&LearnerPath> = if args.include_completers {
        data.cohort(CohortLabel::Dropout)
            .chain(data.cohort(CohortLabel::Completer))
            .collect()
    } else {
        data.cohort(CohortLabel::Dropout).collect()
    };
    let matrix =
        catchup_theme_matrix(matrix_paths, &data.structure, options).map_err(|e| data_err("theme matrix")(&e))?;
    run.write("theme_report", &args.out, theme_report_csv(&report).as_bytes())?;
    let matrix_out = args
        .matrix_out
        .clone()
        .unwrap_or_else(|| sibling(&args.out, "matrix.csv"));
    run.write(
        "theme_matrix",
        &matrix_out,
        theme_matrix_csv(&matrix, options).as_bytes(),
    )?;
    run.config(&json!({
        "merge_assessment": args.merge_assessment,
        "include_completers": args.include_completers,
        "completion_threshold": data.threshold,
    }));
    run.finish(&args.out)
}

fn stats(args: StatsArgs) -> Result<(), CliError> {
    let mut run = Run::new("stats");
    let data = load_dataset(&mut run, &args.data)?;
    let rates =
        per_step_rates(&data.paths, &data.labels, &data.structure).map_err(|e| data_err("per-step rates")(&e))?;
    let report =
        compare_cohort_rates(data.structure.run_label(), &rates).map_err(|e| data_err("cohort comparison")(&e))?;
    run.write("report", &args.out, comparison_to_json(&report).as_bytes())?;
    run.config(&json!({ "completion_threshold": data.threshold }));
    run.finish(&args.out)
}

fn predict(args: PredictArgs) -> Result<(), CliError> {
    let mut run = Run::new("predict");
    let mut config: TrainConfig = match &args.config {
        Some(p) => read_json(&mut run, "config", p)?,
        None => TrainConfig::default(),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(f) = args.window_fraction {
        config.early_window_fraction = f;
    }
    config.validate().map_err(|e| config_err("training config")(&e))?;
    let variant = Variant::from(args.variant);
    let data = load_dataset(&mut run, &args.data)?;
    let set = early_dropout_dataset(&data.paths, &data.labels, &data.structure, &config)
        .map_err(|e| data_err("early-dropout features")(&e))?;
    let report = evaluate(&set.features, &set.labels, &config, variant).map_err(|e| data_err("evaluation")(&e))?;
    let model = boost::train(&set.features, &set.labels, &config, variant)
        .map_err(|e| data_err("training")(&e))?
        .model;
    run.write("accuracy", &args.out, to_json(&report).as_bytes())?;
    let model_out = args
        .model_out
        .clone()
        .unwrap_or_else(|| sibling(&args.out, "model.json"));
    run.write("model", &model_out, to_json(&model).as_bytes())?;
    run.config(&json!({
        "train": config,
        "variant": variant.as_str(),
        "completion_threshold": data.threshold,
    }));
    run.manifest.seeds.insert("cross_validation".into(), config.seed);
    run.finish(&args.out)
}

fn render(args: RenderArgs) -> Result<(), CliError> {
    let mut run = Run::new("render");
    let style = load_style(&mut run, args.style.as_deref())?;
    let structure_bytes = run.read("structure", &args.structure)?;
    let structure = load_structure(&structure_bytes[..])
        .map_err(|e| data_err(format!("structure {}", args.structure.display()))(&e))?;
    let text = run.read("network", &args.network)?;
    let text = String::from_utf8(text).map_err(|e| data_err(format!("network {}", args.network.display()))(&e))?;
    let network = network_from_json(&text).map_err(|e| data_err(format!("network {}", args.network.display()))(&e))?;
    let unit = match network.nodes.first().map(|n| n.id) {
        Some(NodeId::Block(_)) => match args.block_size {
            Some(k) => NodeUnit::blocks(k).map_err(|e| config_err("--block-size")(&e))?,
            None => return Err(CliError::Config("block networks need --block-size".into())),
        },
        Some(NodeId::Week(_)) => NodeUnit::Week,
        _ => NodeUnit::Step,
    };
    let dot = emit_dot(&network, &network.node_themes(&structure, unit), &style);
    run.write("dot", &args.out, dot.as_bytes())?;
    run.config(&json!({ "block_size": args.block_size }));
    run.finish(&args.out)
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code. Diagnostics go to stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = match cli.command {
        Command::Synth(a) => synth(a),
        Command::Ingest(a) => ingest(a),
        Command::Flow(a) => flow(a),
        Command::Themes(a) => themes(a),
        Command::Stats(a) => stats(a),
        Command::Predict(a) => predict(a),
        Command::Render(a) => render(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
