//! The `rdematel` command line.
//!
//! Exit codes: 0 success, 2 validation or analysis failure, 3 I/O failure.
//! Analysis settings resolve as flag, then `RDEMATEL_*` environment
//! variable, then the bundle's `analysis` block, then the built-in default.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dematel::{CrispEnvelope, ExpertMatrix, TauStrategy};
use crate::error::ValidationReport;
use crate::ingest::{
    parse_expert_csv, parse_study_bundle, write_bundle, BundleDefaults, Category, CriterionMeta,
    RespondentMeta, Role, StudyBundle, StudyData,
};
use crate::network::{CrispifyMode, ThresholdMode};
use crate::pipeline::{analyze_experts, analyze_group, Analysis, AnalysisConfig};
use crate::published;
use crate::report::{self, AnalysisReport, DeviationStatus};
use crate::rough::Scale;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "rdematel",
    version,
    about = "Rough DEMATEL analysis of expert influence judgments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a study bundle (.json) or an expert matrix (.csv)
    Validate { input: PathBuf },
    /// Run the full analysis and write the report files
    Analyze {
        bundle: PathBuf,
        #[command(flatten)]
        settings: Settings,
        /// Directory for report files; prints the weights table when omitted
        #[arg(long, env = "RDEMATEL_OUT")]
        out: Option<PathBuf>,
    },
    /// Print the influence network as a Graphviz digraph
    Graph {
        bundle: PathBuf,
        #[command(flatten)]
        settings: Settings,
        #[arg(long, env = "RDEMATEL_OUT")]
        out: Option<PathBuf>,
    },
    /// Rerun the shipped study and reconcile it against the printed tables
    ReproducePaper {
        #[arg(long, env = "RDEMATEL_OUT")]
        out: Option<PathBuf>,
        #[arg(long, env = "RDEMATEL_TAU")]
        tau: Option<TauStrategy>,
    },
    /// Generate a random raw-mode study bundle
    Synth {
        #[arg(long, env = "RDEMATEL_CRITERIA")]
        criteria: usize,
        #[arg(long, env = "RDEMATEL_EXPERTS")]
        experts: usize,
        #[arg(long, env = "RDEMATEL_SEED")]
        seed: u64,
        /// Every expert gives the same matrix
        #[arg(long, env = "RDEMATEL_UNANIMOUS")]
        unanimous: bool,
        #[arg(long, env = "RDEMATEL_OUT")]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct Settings {
    #[arg(long, env = "RDEMATEL_TAU")]
    pub tau: Option<TauStrategy>,
    #[arg(long, env = "RDEMATEL_ENVELOPE")]
    pub envelope: Option<CrispEnvelope>,
    #[arg(long, env = "RDEMATEL_CRISPIFY")]
    pub crispify: Option<CrispifyMode>,
    /// `mean-sigma:<k>` or `fixed:<q>`
    #[arg(long, env = "RDEMATEL_THRESHOLD")]
    pub threshold: Option<ThresholdMode>,
    /// Use diagonal entries in the threshold and keep self-loops
    #[arg(long, env = "RDEMATEL_INCLUDE_DIAGONAL")]
    pub include_diagonal: bool,
}

impl Settings {
    pub fn resolve(&self, bundle: &BundleDefaults) -> AnalysisConfig {
        let mut config = AnalysisConfig::default();
        bundle.apply(&mut config);
        let flags = BundleDefaults {
            tau: self.tau,
            envelope: self.envelope,
            crispify: self.crispify,
            threshold: self.threshold,
        };
        flags.apply(&mut config);
        config.include_diagonal = self.include_diagonal;
        config
    }
}

#[derive(Debug)]
enum Failure {
    Io(String),
    Invalid(String),
}

type Outcome = std::result::Result<(), Failure>;

impl From<crate::error::Error> for Failure {
    fn from(e: crate::error::Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> std::result::Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| io_err(path, e))
}

fn write_file(path: &Path, bytes: &[u8]) -> Outcome {
    fs::write(path, bytes).map_err(|e| io_err(path, e))
}

fn emit(out: &mut dyn Write, bytes: &[u8]) -> Outcome {
    out.write_all(bytes)
        .map_err(|e| Failure::Io(format!("stdout: {e}")))
}

fn invalid_report(r: &ValidationReport) -> Failure {
    Failure::Invalid(r.to_string())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(Failure::Io(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_IO
        }
        Err(Failure::Invalid(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INVALID
        }
    }
}

fn execute(
    cmd: Command,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> std::result::Result<i32, Failure> {
    match cmd {
        Command::Validate { input } => validate(&input, out).map(|_| EXIT_OK),
        Command::Analyze {
            bundle,
            settings,
            out: dir,
        } => analyze(&bundle, &settings, dir.as_deref(), out).map(|_| EXIT_OK),
        Command::Graph {
            bundle,
            settings,
            out: file,
        } => {
            let (_, analysis) = load_and_analyze(&bundle, &settings)?;
            let dot = report::render_graph_dot(&analysis.network);
            match file {
                Some(f) => write_file(&f, &dot)?,
                None => emit(out, &dot)?,
            }
            Ok(EXIT_OK)
        }
        Command::ReproducePaper { out: dir, tau } => reproduce(dir.as_deref(), tau, out, err),
        Command::Synth {
            criteria,
            experts,
            seed,
            unanimous,
            out: file,
        } => {
            let bundle = synth_bundle(criteria, experts, seed, unanimous)?;
            let text = write_bundle(&bundle);
            match file {
                Some(f) => write_file(&f, text.as_bytes())?,
                None => emit(out, text.as_bytes())?,
            }
            Ok(EXIT_OK)
        }
    }
}

fn is_csv(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn validate(input: &Path, out: &mut dyn Write) -> Outcome {
    let bytes = read(input)?;
    let summary = if is_csv(input) {
        let expert = input
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "expert".into());
        let parsed =
            parse_expert_csv(&bytes, &expert, &Scale::default()).map_err(|r| invalid_report(&r))?;
        format!("valid expert matrix: {} criteria\n", parsed.criteria.len())
    } else {
        let b = parse_study_bundle(&bytes).map_err(|r| invalid_report(&r))?;
        format!(
            "valid bundle: {} criteria, {} respondents, {} mode\n",
            b.criteria.len(),
            b.respondents.len(),
            if b.is_aggregate() { "aggregate" } else { "raw" }
        )
    };
    emit(out, summary.as_bytes())
}

fn load_bundle(path: &Path) -> std::result::Result<StudyBundle, Failure> {
    parse_study_bundle(&read(path)?).map_err(|r| invalid_report(&r))
}

/// Runs the pipeline on a parsed bundle with a resolved configuration.
pub fn analyze_bundle(
    bundle: &StudyBundle,
    config: &AnalysisConfig,
) -> crate::error::Result<Analysis> {
    let ids = bundle.criterion_ids();
    match &bundle.data {
        StudyData::Raw(m) => analyze_experts(&ids, m, config),
        StudyData::Aggregate(g) => analyze_group(&ids, g.clone(), config),
    }
}

fn load_and_analyze(
    path: &Path,
    settings: &Settings,
) -> std::result::Result<(StudyBundle, Analysis), Failure> {
    let bundle = load_bundle(path)?;
    let config = settings.resolve(&bundle.defaults);
    let analysis = analyze_bundle(&bundle, &config)?;
    Ok((bundle, analysis))
}

fn write_report_files(dir: &Path, report: &AnalysisReport, out: &mut dyn Write) -> Outcome {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let tables = report::render_tables(report);
    let mut files = vec![
        ("report.json", tables.json),
        ("prominence.csv", tables.prominence_csv),
        ("weights.csv", tables.weights_csv),
        ("causal.csv", tables.causal_csv),
    ];
    if let Some(n) = &report.network {
        files.push(("network.dot", report::render_graph_dot(n)));
    }
    if !report.deviations.is_empty() {
        files.push((
            "deviations.csv",
            report::render_deviations_csv(&report.deviations),
        ));
    }
    for (name, bytes) in files {
        let path = dir.join(name);
        write_file(&path, &bytes)?;
        emit(out, format!("wrote {}\n", path.display()).as_bytes())?;
    }
    Ok(())
}

fn analyze(path: &Path, settings: &Settings, dir: Option<&Path>, out: &mut dyn Write) -> Outcome {
    let (bundle, analysis) = load_and_analyze(path, settings)?;
    let report = AnalysisReport::from_analysis(&analysis, bundle.name.clone());
    match dir {
        Some(d) => write_report_files(d, &report, out),
        None => emit(out, &report::render_weights_csv(&report.results)),
    }
}

fn reproduce(
    dir: Option<&Path>,
    tau: Option<TauStrategy>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> std::result::Result<i32, Failure> {
    let bundle =
        parse_study_bundle(published::STUDY_BUNDLE.as_bytes()).map_err(|r| invalid_report(&r))?;
    let settings = Settings {
        tau,
        ..Settings::default()
    };
    let config = settings.resolve(&bundle.defaults);
    let analysis = analyze_bundle(&bundle, &config)?;
    let ledger = report::deviation_ledger(&analysis)?;

    let count = |s: DeviationStatus| ledger.iter().filter(|e| e.status == s).count();
    let (pass, fail, nc) = (
        count(DeviationStatus::Pass),
        count(DeviationStatus::Fail),
        count(DeviationStatus::NotComparable),
    );
    let mut tables: Vec<&str> = ledger.iter().map(|e| e.table.as_str()).collect();
    tables.dedup();
    let mut summary = format!("tau strategy {} (tau = {:?})\n", config.tau, analysis.tau);
    for t in tables {
        let of = |s| {
            ledger
                .iter()
                .filter(|e| e.table == t && e.status == s)
                .count()
        };
        summary.push_str(&format!(
            "table {t}: {} pass, {} fail, {} not comparable\n",
            of(DeviationStatus::Pass),
            of(DeviationStatus::Fail),
            of(DeviationStatus::NotComparable)
        ));
    }
    summary.push_str(&format!(
        "total: {pass} pass, {fail} fail, {nc} not comparable\n"
    ));
    emit(out, summary.as_bytes())?;

    if let Some(d) = dir {
        let mut report = AnalysisReport::from_analysis(&analysis, bundle.name.clone());
        report.deviations = ledger.clone();
        write_report_files(d, &report, out)?;
        let printed = report::weights_from_printed_crisp()?;
        let path = d.join("weights_from_printed_crisp.csv");
        write_file(&path, &report::render_weights_csv(&printed))?;
        emit(out, format!("wrote {}\n", path.display()).as_bytes())?;
    }
    for e in ledger.iter().filter(|e| e.status == DeviationStatus::Fail) {
        let _ = writeln!(
            err,
            "FAIL table {} {}: reference {} computed {:.6} diff {:.6} > {}",
            e.table, e.cell, e.reference, e.computed, e.abs_diff, e.tolerance
        );
    }
    Ok(if fail == 0 { EXIT_OK } else { EXIT_INVALID })
}

/// Random raw-mode bundle with `criteria` criteria and `experts` respondents.
pub fn synth_bundle(
    criteria: usize,
    experts: usize,
    seed: u64,
    unanimous: bool,
) -> crate::error::Result<StudyBundle> {
    if criteria == 0 {
        return Err(crate::error::Error::InvalidArgument(
            "--criteria must be at least 1".into(),
        ));
    }
    let scale = Scale::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| -> Vec<Vec<i64>> {
        (0..criteria)
            .map(|i| {
                (0..criteria)
                    .map(|j| {
                        if i == j {
                            0
                        } else {
                            rng.gen_range(i64::from(scale.min)..=i64::from(scale.max))
                        }
                    })
                    .collect()
            })
            .collect()
    };
    let shared = draw(&mut rng);
    let mut matrices = Vec::with_capacity(experts);
    let mut respondents = Vec::with_capacity(experts);
    for e in 0..experts {
        let id = format!("R{}", e + 1);
        let rows = if unanimous || e == 0 {
            shared.clone()
        } else {
            draw(&mut rng)
        };
        matrices.push(ExpertMatrix::from_ints(id.clone(), &rows, &scale)?);
        respondents.push(RespondentMeta {
            id,
            role: if e % 3 == 2 {
                Role::Academic
            } else {
                Role::Practitioner
            },
            description: String::new(),
        });
    }
    Ok(StudyBundle {
        name: Some(format!("synthetic study, seed {seed}")),
        scale,
        criteria: (1..=criteria)
            .map(|i| CriterionMeta {
                id: format!("C{i}"),
                name: format!("Criterion {i}"),
                category: Category::Custom,
                description: String::new(),
            })
            .collect(),
        respondents,
        data: StudyData::Raw(matrices),
        defaults: BundleDefaults::default(),
    })
}
