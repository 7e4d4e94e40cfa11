mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use scriptorium::analyze::{self, scribe_statistics, scribe_statistics_csv};
use scriptorium::learn::{ForestParams, OcsvmParams};
use scriptorium::plot;
use scriptorium::synth::{demo_corpus_spec, write_corpus, SynthCorpusSpec};
use scriptorium::{
    density_report, segment_corpus, AggregateBy, BrevigraphInventory, Corpus, DensityLevel, DensityReport,
    EmbeddingResult, Error, GroupBy, ImportanceParams, OutlierParams, ScatterParams, ScribeLabel, Segment,
};

use config::{PartialConfig, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "scriptorium", version, about = "Scribal profiling from diplomatic transcriptions")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// JSON manifest listing transcription files and their metadata
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    /// JSON brevigraph inventory replacing the built-in one
    #[arg(long, global = true)]
    inventory: Option<PathBuf>,
    /// JSON file with run settings; command-line flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    segment_size: Option<usize>,
    #[arg(long, global = true)]
    top_k: Option<usize>,
    #[arg(long, global = true)]
    pca_dims: Option<usize>,
    /// pca2d or neighbor
    #[arg(long, global = true)]
    embed_method: Option<String>,
    #[arg(long, global = true)]
    nu: Option<f64>,
    /// "scale" or a positive number
    #[arg(long, global = true)]
    gamma: Option<String>,
    #[arg(long, global = true)]
    trees: Option<usize>,
    #[arg(long, global = true)]
    min_segments: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
}

impl GlobalArgs {
    fn partial(&self) -> PartialConfig {
        PartialConfig {
            manifest_path: self.manifest.clone(),
            inventory_path: self.inventory.clone(),
            segment_size: self.segment_size,
            top_k: self.top_k,
            pca_dims: self.pca_dims,
            embed_method: self.embed_method.clone(),
            nu: self.nu,
            gamma: self.gamma.clone(),
            n_trees: self.trees,
            min_segments: self.min_segments,
            seed: self.seed,
            output_dir: self.out.clone(),
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Per-scribe corpus statistics
    Stats,
    /// Abbreviation densities grouped by scribe, codex or unit
    Density {
        #[arg(long, default_value = "scribe", value_parser = parse_group_by)]
        group_by: GroupBy,
        #[arg(long, default_value = "character", value_parser = parse_level)]
        level: DensityLevel,
        /// Compute densities per segment instead of per production unit
        #[arg(long)]
        segments: bool,
        /// Sum counts within a group before dividing
        #[arg(long)]
        pooled: bool,
    },
    /// Scatterplot of all scribes with enough segments
    Scatter,
    /// Scatterplot of two scribes
    Pairwise {
        #[arg(long, num_args = 2, required = true)]
        scribes: Vec<String>,
    },
    /// Scatterplot of an equal random sample per scribe
    Downsample {
        #[arg(long, value_delimiter = ',', required = true)]
        labels: Vec<String>,
        #[arg(long)]
        n: usize,
    },
    /// Leave-one-unit-out outlier detection for one scribe
    Outliers {
        #[arg(long)]
        scribe: String,
        #[arg(long, default_value = "codex")]
        aggregate_by: AggregateBy,
    },
    /// Random-forest feature importances for one unit against the rest of a scribe's units
    Importance {
        #[arg(long)]
        scribe: String,
        #[arg(long)]
        codex: String,
        #[arg(long)]
        unit: String,
        #[arg(long, default_value_t = 10)]
        top_m: usize,
    },
    /// Nearest-neighbour attribution of one scribe's segments
    Attribute {
        #[arg(long)]
        query: String,
        #[arg(long, value_delimiter = ',', required = true)]
        refs: Vec<String>,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Writes a synthetic corpus (transcriptions plus manifest)
    Synth {
        /// Corpus spec as JSON; the built-in demo when omitted
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Cluster count of a standard unit in the demo corpus
        #[arg(long, default_value_t = 50_000)]
        unit_clusters: usize,
    },
}

fn parse_group_by(s: &str) -> Result<GroupBy, String> {
    match s {
        "scribe" => Ok(GroupBy::Scribe),
        "codex" => Ok(GroupBy::Codex),
        "unit" => Ok(GroupBy::Unit),
        "codex-unit" => Ok(GroupBy::CodexUnit),
        _ => Err(format!("expected scribe, codex, unit or codex-unit, got {s:?}")),
    }
}

fn parse_level(s: &str) -> Result<DensityLevel, String> {
    match s {
        "character" | "char" => Ok(DensityLevel::Character),
        "word" => Ok(DensityLevel::Word),
        _ => Err(format!("expected character or word, got {s:?}")),
    }
}

enum Failure {
    Config(String),
    Data(String),
    Analysis(String),
    Output(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Output(_) => 1,
            Failure::Config(_) => 2,
            Failure::Data(_) => 3,
            Failure::Analysis(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Data(m) | Failure::Analysis(m) | Failure::Output(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Corpus(_) | Error::Metrics(_) => Failure::Data(msg),
            Error::Analysis(_) | Error::Learn(_) | Error::Reduce(_) => Failure::Analysis(msg),
            Error::Synth(_) => Failure::Config(msg),
            Error::Serialize(_) => Failure::Output(msg),
        }
    }
}

macro_rules! impl_from {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Error::from(e).into()
            }
        }
    )*};
}

impl_from!(
    scriptorium::CorpusError,
    scriptorium::MetricsError,
    scriptorium::AnalysisError,
    scriptorium::SynthError
);

struct Session {
    config: RunConfig,
    inventory: BrevigraphInventory,
}

impl Session {
    fn corpus(&self) -> Result<Corpus, Failure> {
        let path = self
            .config
            .manifest_path
            .as_deref()
            .ok_or_else(|| Failure::Config("--manifest is required for this command".into()))?;
        Ok(Corpus::load_path(path, &self.inventory)?)
    }

    fn segments(&self) -> Result<Vec<Segment>, Failure> {
        Ok(segment_corpus(&self.corpus()?, self.config.segment_size))
    }

    fn scatter_params(&self) -> ScatterParams {
        ScatterParams {
            top_k: self.config.top_k,
            pca_k: self.config.pca_dims,
            method: self.config.embed_method,
            seed: self.config.seed,
            ..ScatterParams::default()
        }
    }

    fn write(&self, name: &str, ext: &str, body: &str) -> Result<PathBuf, Failure> {
        let dir = &self.config.output_dir;
        std::fs::create_dir_all(dir).map_err(|e| Failure::Output(format!("{}: {e}", dir.display())))?;
        let path = dir.join(format!("{name}.{ext}"));
        std::fs::write(&path, body).map_err(|e| Failure::Output(format!("{}: {e}", path.display())))?;
        Ok(path)
    }

    fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf, Failure> {
        let mut body = serde_json::to_string_pretty(value).map_err(|e| Failure::Output(e.to_string()))?;
        body.push('\n');
        self.write(name, "json", &body)
    }

    fn write_embedding(&self, name: &str, e: &EmbeddingResult, title: &str) -> Result<PathBuf, Failure> {
        self.write_json(name, e)?;
        self.write(name, "svg", &plot::scatter_svg(e, title))?;
        self.write(name, "csv", &e.to_csv().map_err(|e| Failure::Output(e.to_string()))?)
    }
}

fn label(s: &str) -> Result<ScribeLabel, Failure> {
    ScribeLabel::new(s).map_err(|e| Failure::Config(e.to_string()))
}

fn csv_err(e: impl std::fmt::Display) -> Failure {
    Failure::Output(e.to_string())
}

fn density_csv(report: &DensityReport) -> String {
    let mut out = String::from("key,n_documents,n_samples,mean_density_char,mean_density_word,min,q1,median,q3,max\n");
    for r in &report.rows {
        let key = if r.key.contains([',', '"', '\n']) {
            format!("\"{}\"", r.key.replace('"', "\"\""))
        } else {
            r.key.clone()
        };
        let s = r.summary;
        out.push_str(&format!(
            "{key},{},{},{},{},{},{},{},{},{}\n",
            r.n_documents, r.n_samples, r.mean_density_char, r.mean_density_word, s.min, s.q1, s.median, s.q3, s.max
        ));
    }
    out
}

fn run(session: &Session, command: &Command) -> Result<String, Failure> {
    let cfg = &session.config;
    match command {
        Command::Stats => {
            let corpus = match &cfg.manifest_path {
                Some(_) => session.corpus()?,
                None => return Err(Failure::Config("--manifest is required for this command".into())),
            };
            let rows = scribe_statistics(&corpus, cfg.segment_size)?;
            session.write_json("stats", &rows)?;
            let path = session.write("stats", "csv", &scribe_statistics_csv(&rows).map_err(csv_err)?)?;
            Ok(format!(
                "stats: {} scribes, {} units -> {}",
                rows.len(),
                corpus.docs.len(),
                path.display()
            ))
        }
        Command::Density { group_by, level, segments, pooled } => {
            let corpus = session.corpus()?;
            let report = if *segments {
                density_report(&segment_corpus(&corpus, cfg.segment_size), *group_by, *level, *pooled)?
            } else {
                density_report(&corpus.docs, *group_by, *level, *pooled)?
            };
            session.write_json("density", &report)?;
            let groups: Vec<_> = report.rows.iter().map(|r| (r.key.clone(), r.summary)).collect();
            session.write("density", "svg", &plot::boxplot_svg(&groups, "abbreviation density"))?;
            let path = session.write("density", "csv", &density_csv(&report))?;
            Ok(format!("density: {} groups -> {}", report.rows.len(), path.display()))
        }
        Command::Scatter => {
            let segments = session.segments()?;
            let e = analyze::scatter_analysis(&segments, cfg.min_segments, &session.scatter_params())?;
            let path = session.write_embedding("scatter", &e, "brevigraph bigrams")?;
            Ok(format!("scatter: {} segments -> {}", e.labels.len(), path.display()))
        }
        Command::Pairwise { scribes } => {
            let (a, b) = (label(&scribes[0])?, label(&scribes[1])?);
            let segments = session.segments()?;
            let e = analyze::pairwise_scatter(&segments, [&a, &b], &session.scatter_params())?;
            let path = session.write_embedding("pairwise", &e, &format!("{a} vs {b}"))?;
            Ok(format!("pairwise: {} segments -> {}", e.labels.len(), path.display()))
        }
        Command::Downsample { labels, n } => {
            let labels = labels.iter().map(|l| label(l)).collect::<Result<Vec<_>, _>>()?;
            let segments = session.segments()?;
            let e = analyze::downsampled_scatter(&segments, &labels, *n, &session.scatter_params())?;
            let path = session.write_embedding("downsample", &e, &format!("{n} segments per scribe"))?;
            Ok(format!("downsample: {} segments -> {}", e.labels.len(), path.display()))
        }
        Command::Outliers { scribe, aggregate_by } => {
            let scribe = label(scribe)?;
            let segments: Vec<Segment> =
                session.segments()?.into_iter().filter(|s| s.scribe() == &scribe).collect();
            if segments.is_empty() {
                return Err(Failure::Analysis(format!("scribe {scribe:?} has no segments")));
            }
            let params = OutlierParams {
                ocsvm: OcsvmParams {
                    nu: cfg.nu,
                    gamma: cfg.gamma,
                    ..OcsvmParams::default()
                },
                top_k: cfg.top_k,
            };
            let report = analyze::loo_outlier_analysis(&segments, &params, *aggregate_by)?;
            session.write_json("outliers", &report)?;
            session.write("outliers", "svg", &plot::outlier_bars_svg(&report, &format!("outliers for {scribe}")))?;
            let path = session.write("outliers", "csv", &report.to_csv().map_err(csv_err)?)?;
            let worst = report
                .rows
                .iter()
                .max_by(|a, b| a.outlier_fraction.total_cmp(&b.outlier_fraction));
            Ok(match worst {
                Some(w) => format!(
                    "outliers: {} rows, highest fraction {:.3} ({}{}) -> {}",
                    report.rows.len(),
                    w.outlier_fraction,
                    w.codex_id,
                    w.unit_id.as_deref().map(|u| format!(" {u}")).unwrap_or_default(),
                    path.display()
                ),
                None => format!("outliers: 0 rows -> {}", path.display()),
            })
        }
        Command::Importance { scribe, codex, unit, top_m } => {
            let scribe = label(scribe)?;
            let segments: Vec<Segment> =
                session.segments()?.into_iter().filter(|s| s.scribe() == &scribe).collect();
            let params = ImportanceParams {
                forest: ForestParams {
                    n_trees: cfg.n_trees,
                    seed: cfg.seed,
                    ..ForestParams::default()
                },
                top_k: cfg.top_k,
                top_m: *top_m,
            };
            let report = analyze::importance_analysis(&segments, (codex, unit), &params)?;
            session.write_json("importance", &report)?;
            session.write(
                "importance",
                "svg",
                &plot::importance_boxplot_svg(&report, &format!("{codex} {unit} vs rest of {scribe}")),
            )?;
            let path = session.write("importance", "csv", &report.to_csv().map_err(csv_err)?)?;
            let top: Vec<_> = report.top(3).map(|b| format!("{b:?}")).collect();
            Ok(format!("importance: top {} -> {}", top.join(" "), path.display()))
        }
        Command::Attribute { query, refs, k } => {
            let query = label(query)?;
            let refs = refs.iter().map(|l| label(l)).collect::<Result<Vec<_>, _>>()?;
            let segments = session.segments()?;
            let a = analyze::attribute_segments(&segments, &query, &refs, *k, cfg.top_k)?;
            session.write_json("attribute", &a)?;
            let path = session.write("attribute", "csv", &a.to_csv().map_err(csv_err)?)?;
            Ok(format!(
                "attribute: {} -> {} ({:.0}% of {} segments) -> {}",
                a.query,
                a.verdict,
                a.agreement * 100.0,
                a.predictions.len(),
                path.display()
            ))
        }
        Command::Synth { spec, unit_clusters } => {
            let spec = match spec {
                Some(p) => {
                    let text = std::fs::read_to_string(p)
                        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", p.display())))?;
                    SynthCorpusSpec::from_json(&text)
                        .map_err(|e| Failure::Config(format!("invalid spec {}: {e}", p.display())))?
                }
                None => demo_corpus_spec(*unit_clusters),
            };
            let docs = spec.generate(cfg.seed, &session.inventory)?;
            let dir = cfg.output_dir.join("corpus");
            let manifest = write_corpus(&docs, &dir)?;
            session.write("synth", "json", &format!("{}\n", spec.to_json()))?;
            Ok(format!("synth: {} units -> {}", docs.len(), manifest.display()))
        }
    }
}

fn setup(cli: &Cli) -> Result<Session, Failure> {
    let file = match &cli.global.config {
        Some(p) => PartialConfig::load(p).map_err(Failure::Config)?,
        None => PartialConfig::default(),
    };
    let config = cli.global.partial().over(file).resolve().map_err(Failure::Config)?;
    if let Some(n) = cli.global.threads {
        if n == 0 {
            return Err(Failure::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Config(e.to_string()))?;
    }
    let inventory = match &config.inventory_path {
        Some(p) => BrevigraphInventory::load(p).map_err(|e| Failure::Config(e.to_string()))?,
        None => BrevigraphInventory::default(),
    };
    Ok(Session { config, inventory })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = setup(&cli).and_then(|s| run(&s, &cli.command));
    match result {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
