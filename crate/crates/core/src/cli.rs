//! Command-line front end.
//!
//! Settings come from, in increasing priority: built-in defaults, the
//! `config.txt` recorded in a model directory (for `predict`), a `--config`
//! key=value file, the `LEXCOMP_SEED` environment variable, and flags.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};

use crate::align::{self, MatchKind};
use crate::annotate::AnnotationConfig;
use crate::corpus::{self, Dataset};
use crate::embeddings::{self, CtxStore, WordVecStore, DEFAULT_GLOVE_DIM};
use crate::linreg::DEFAULT_LAMBDA;
use crate::metrics::MetricsReport;
use crate::pipeline::{
    self, ClassificationConfig, EnsembleConfig, FeatureSource, FeatureStores, TrainedModels,
};
use crate::svm::{Gamma, SvmParams};
use crate::util::format_score;

pub const SEED_ENV: &str = "LEXCOMP_SEED";
const RUN_CONFIG_FILE: &str = "config.txt";

#[derive(Debug, Parser)]
#[command(name = "lexcomp", version, about = "Lexical complexity prediction")]
pub struct Cli {
    /// key=value configuration file
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Wrap each row's target in single quotes
    Preprocess {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "out")]
        output: PathBuf,
    },
    /// Train the classification and/or regression pipelines
    Train(ConfigArgs),
    /// Write `id<TAB>prediction` rows for an instance file
    Predict(ConfigArgs),
    /// Join predictions with gold scores on id and report metrics
    Evaluate {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gold: PathBuf,
        /// Print the report as JSON instead of TSV
        #[arg(long)]
        json: bool,
    },
    /// Dump the dummy annotation set of every labeled row
    GenAnnotations(ConfigArgs),
    /// Print the manifest of a trained model directory
    ExportManifest {
        #[arg(long)]
        model_dir: PathBuf,
        #[arg(long = "out")]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Pipelines {
    Both,
    Classification,
    Regression,
}

impl Pipelines {
    fn as_str(self) -> &'static str {
        match self {
            Pipelines::Both => "both",
            Pipelines::Classification => "classification",
            Pipelines::Regression => "regression",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        <Pipelines as ValueEnum>::from_str(s, true).map_err(|e| anyhow!(e))
    }

    fn classification(self) -> bool {
        self != Pipelines::Regression
    }

    fn regression(self) -> bool {
        self != Pipelines::Classification
    }
}

/// Flags that override [`RunConfig`] keys.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    #[arg(long)]
    pub train: Option<PathBuf>,
    #[arg(long)]
    pub val: Option<PathBuf>,
    /// Input TSV (predict, gen-annotations)
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    /// Output TSV (predict, gen-annotations)
    #[arg(long = "out")]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub glove: Option<PathBuf>,
    #[arg(long)]
    pub glove_dim: Option<usize>,
    #[arg(long)]
    pub contextual: Option<PathBuf>,
    #[arg(long)]
    pub model_dir: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long = "c")]
    pub c_slack: Option<f64>,
    /// Positive number or `auto`
    #[arg(long)]
    pub gamma: Option<String>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_passes: Option<usize>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub w_reg: Option<f64>,
    #[arg(long)]
    pub w_cls: Option<f64>,
    #[arg(long)]
    pub cls_feature: Option<String>,
    #[arg(long)]
    pub reg_feature: Option<String>,
    #[arg(long, value_enum)]
    pub pipelines: Option<Pipelines>,
    /// Train annotator slots one after another
    #[arg(long)]
    pub serial: bool,
}

/// Fully resolved run settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub train: Option<PathBuf>,
    pub val: Option<PathBuf>,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub glove: Option<PathBuf>,
    pub glove_dim: usize,
    pub contextual: Option<PathBuf>,
    pub model_dir: Option<PathBuf>,
    pub annotation: AnnotationConfig,
    pub svm: SvmParams,
    pub lambda: f64,
    pub ensemble: EnsembleConfig,
    pub cls_feature: FeatureSource,
    /// `None` resolves to contextual when a contextual file is configured and
    /// to glove otherwise.
    pub reg_feature: Option<FeatureSource>,
    pub pipelines: Pipelines,
    pub parallel: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            train: None,
            val: None,
            input: None,
            output: None,
            glove: None,
            glove_dim: DEFAULT_GLOVE_DIM,
            contextual: None,
            model_dir: None,
            annotation: AnnotationConfig::default(),
            svm: SvmParams::default(),
            lambda: DEFAULT_LAMBDA,
            ensemble: EnsembleConfig::default(),
            cls_feature: FeatureSource::Glove,
            reg_feature: None,
            pipelines: Pipelines::Both,
            parallel: true,
        }
    }
}

fn parse_gamma(v: &str) -> Result<Gamma> {
    if v.eq_ignore_ascii_case("auto") {
        Ok(Gamma::Auto)
    } else {
        Ok(Gamma::Value(
            v.parse().with_context(|| format!("gamma `{v}`"))?,
        ))
    }
}

fn parse_bool(v: &str) -> Result<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => bail!("expected a boolean, found `{v}`"),
    }
}

impl RunConfig {
    /// Sets one key. Keys match the long flag names; `-` and `_` are
    /// interchangeable.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('-', "_");
        let v = value.trim();
        let num = |what: &str| format!("{what} `{v}`");
        match key.as_str() {
            "train" => self.train = Some(v.into()),
            "val" => self.val = Some(v.into()),
            "in" | "input" => self.input = Some(v.into()),
            "out" | "output" => self.output = Some(v.into()),
            "glove" => self.glove = Some(v.into()),
            "glove_dim" => self.glove_dim = v.parse().with_context(|| num("glove_dim"))?,
            "contextual" => self.contextual = Some(v.into()),
            "model_dir" => self.model_dir = Some(v.into()),
            "n" => self.annotation.n = v.parse().with_context(|| num("n"))?,
            "rho" => self.annotation.rho = v.parse().with_context(|| num("rho"))?,
            "seed" => self.annotation.seed = v.parse().with_context(|| num("seed"))?,
            "c" | "c_slack" => self.svm.c_slack = v.parse().with_context(|| num("c"))?,
            "gamma" => self.svm.gamma = parse_gamma(v)?,
            "tol" => self.svm.tol = v.parse().with_context(|| num("tol"))?,
            "max_passes" => self.svm.max_passes = v.parse().with_context(|| num("max_passes"))?,
            "lambda" => self.lambda = v.parse().with_context(|| num("lambda"))?,
            "w_reg" => self.ensemble.w_reg = v.parse().with_context(|| num("w_reg"))?,
            "w_cls" => self.ensemble.w_cls = v.parse().with_context(|| num("w_cls"))?,
            "cls_feature" => self.cls_feature = v.parse().map_err(|e: String| anyhow!(e))?,
            "reg_feature" => {
                self.reg_feature = if v.eq_ignore_ascii_case("auto") {
                    None
                } else {
                    Some(v.parse().map_err(|e: String| anyhow!(e))?)
                }
            }
            "pipelines" => self.pipelines = Pipelines::parse(v)?,
            "parallel" => self.parallel = parse_bool(v)?,
            _ => bail!("unknown config key `{key}`"),
        }
        Ok(())
    }

    /// Applies a key=value file; `#` starts a comment.
    pub fn merge_file(&mut self, path: &Path) -> Result<()> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("{}:{}: expected key=value", path.display(), i + 1))?;
            self.set(k, v)
                .with_context(|| format!("{}:{}", path.display(), i + 1))?;
        }
        Ok(())
    }

    pub fn merge_env_seed(&mut self, seed: Option<&str>) -> Result<()> {
        if let Some(s) = seed {
            self.annotation.seed = s
                .trim()
                .parse()
                .with_context(|| format!("{SEED_ENV}=`{s}` is not an unsigned integer"))?;
        }
        Ok(())
    }

    pub fn merge_args(&mut self, a: &ConfigArgs) -> Result<()> {
        macro_rules! take {
            ($field:ident => $dst:expr) => {
                if let Some(v) = &a.$field {
                    $dst = v.clone();
                }
            };
        }
        if a.train.is_some() {
            self.train = a.train.clone();
        }
        if a.val.is_some() {
            self.val = a.val.clone();
        }
        if a.input.is_some() {
            self.input = a.input.clone();
        }
        if a.output.is_some() {
            self.output = a.output.clone();
        }
        if a.glove.is_some() {
            self.glove = a.glove.clone();
        }
        if a.contextual.is_some() {
            self.contextual = a.contextual.clone();
        }
        if a.model_dir.is_some() {
            self.model_dir = a.model_dir.clone();
        }
        take!(glove_dim => self.glove_dim);
        take!(n => self.annotation.n);
        take!(rho => self.annotation.rho);
        take!(seed => self.annotation.seed);
        take!(c_slack => self.svm.c_slack);
        take!(tol => self.svm.tol);
        take!(max_passes => self.svm.max_passes);
        take!(lambda => self.lambda);
        take!(w_reg => self.ensemble.w_reg);
        take!(w_cls => self.ensemble.w_cls);
        take!(pipelines => self.pipelines);
        if let Some(g) = &a.gamma {
            self.set("gamma", g)?;
        }
        if let Some(f) = &a.cls_feature {
            self.set("cls_feature", f)?;
        }
        if let Some(f) = &a.reg_feature {
            self.set("reg_feature", f)?;
        }
        if a.serial {
            self.parallel = false;
        }
        Ok(())
    }

    pub fn regression_feature(&self) -> FeatureSource {
        self.reg_feature.unwrap_or(if self.contextual.is_some() {
            FeatureSource::Contextual
        } else {
            FeatureSource::Glove
        })
    }

    /// Serializes the embedding paths and training settings in `merge_file`
    /// syntax.
    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        let gamma = match self.svm.gamma {
            Gamma::Auto => "auto".to_string(),
            Gamma::Value(g) => g.to_string(),
        };
        let reg = self
            .reg_feature
            .map_or_else(|| "auto".to_string(), |f| f.to_string());
        if let Some(g) = &self.glove {
            let _ = writeln!(s, "glove={}", g.display());
        }
        if let Some(c) = &self.contextual {
            let _ = writeln!(s, "contextual={}", c.display());
        }
        let _ = writeln!(s, "glove_dim={}", self.glove_dim);
        let _ = writeln!(s, "n={}", self.annotation.n);
        let _ = writeln!(s, "rho={}", self.annotation.rho);
        let _ = writeln!(s, "seed={}", self.annotation.seed);
        let _ = writeln!(s, "c={}", self.svm.c_slack);
        let _ = writeln!(s, "gamma={gamma}");
        let _ = writeln!(s, "tol={}", self.svm.tol);
        let _ = writeln!(s, "max_passes={}", self.svm.max_passes);
        let _ = writeln!(s, "lambda={}", self.lambda);
        let _ = writeln!(s, "w_reg={}", self.ensemble.w_reg);
        let _ = writeln!(s, "w_cls={}", self.ensemble.w_cls);
        let _ = writeln!(s, "cls_feature={}", self.cls_feature);
        let _ = writeln!(s, "reg_feature={reg}");
        let _ = writeln!(s, "pipelines={}", self.pipelines.as_str());
        s
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(
        File::open(path).with_context(|| format!("opening {}", path.display()))?,
    ))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn require<'a>(p: &'a Option<PathBuf>, what: &str) -> Result<&'a Path> {
    p.as_deref()
        .ok_or_else(|| anyhow!("missing required setting `{what}`"))
}

fn read_dataset(path: &Path, labeled: bool) -> Result<Dataset> {
    let ds = if labeled {
        corpus::parse_complex_tsv(open(path)?, true)
    } else {
        corpus::parse_complex_tsv_auto(open(path)?)
    };
    ds.with_context(|| format!("parsing {}", path.display()))
}

/// Embedding stores loaded for a run.
#[derive(Debug, Default)]
pub struct LoadedStores {
    pub glove: Option<WordVecStore>,
    pub ctx: Option<CtxStore>,
}

impl LoadedStores {
    fn load(cfg: &RunConfig, needs: &[FeatureSource]) -> Result<Self> {
        let wants_glove = needs
            .iter()
            .any(|f| matches!(f, FeatureSource::Glove | FeatureSource::Concat));
        let wants_ctx = needs
            .iter()
            .any(|f| matches!(f, FeatureSource::Contextual | FeatureSource::Concat));
        let glove = if wants_glove {
            let path = require(&cfg.glove, "glove")?;
            let store = embeddings::load_glove(open(path)?, cfg.glove_dim)
                .with_context(|| format!("loading {}", path.display()))?;
            info!(
                "loaded {} word vectors from {}",
                store.len(),
                path.display()
            );
            Some(store)
        } else {
            None
        };
        let ctx = if wants_ctx {
            let path = require(&cfg.contextual, "contextual")?;
            let store = embeddings::load_contextual(open(path)?)
                .with_context(|| format!("loading {}", path.display()))?;
            info!(
                "loaded {} contextual records from {}",
                store.len(),
                path.display()
            );
            Some(store)
        } else {
            None
        };
        Ok(Self { glove, ctx })
    }

    pub fn stores(&self) -> FeatureStores<'_> {
        FeatureStores::new(self.glove.as_ref(), self.ctx.as_ref())
    }
}

/// Builds a [`RunConfig`] from the layered sources.
pub fn resolve_config(
    base: Option<&Path>,
    config_file: Option<&Path>,
    env_seed: Option<&str>,
    args: &ConfigArgs,
) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(b) = base {
        cfg.merge_file(b)?;
    }
    if let Some(f) = config_file {
        cfg.merge_file(f)?;
    }
    cfg.merge_env_seed(env_seed)?;
    cfg.merge_args(args)?;
    Ok(cfg)
}

pub fn cmd_preprocess(input: &Path, output: &Path) -> Result<()> {
    let data = read_dataset(input, false)?;
    let labeled = !data.is_empty() && data.is_labeled();
    let mut rows = Vec::with_capacity(data.len());
    let mut failed = Vec::new();
    for mut inst in data.into_instances() {
        match align::quote_target(&inst.sentence, &inst.target) {
            Ok(q) => {
                if q.kind == MatchKind::Substring {
                    warn!(
                        "row {}: `{}` matched as a substring only",
                        inst.id, inst.target
                    );
                }
                inst.sentence = q.text;
                rows.push(inst);
            }
            Err(e) => failed.push(format!("{} ({e})", inst.id)),
        }
    }
    if !failed.is_empty() {
        bail!(
            "target not found in {} row(s): {}",
            failed.len(),
            failed.join(", ")
        );
    }
    let data = Dataset::new(rows)?;
    let mut out = create(output)?;
    if data.is_empty() {
        out.flush()?;
        return Ok(());
    }
    corpus::write_tsv(&data, &mut out, labeled)?;
    Ok(())
}

fn load_run(cfg: &RunConfig, needs: &[FeatureSource]) -> Result<(Dataset, LoadedStores)> {
    let train = read_dataset(require(&cfg.train, "train")?, true)?;
    let stores = LoadedStores::load(cfg, needs)?;
    Ok((train, stores))
}

pub fn cmd_train(cfg: &RunConfig, out: &mut dyn Write) -> Result<TrainedModels> {
    let model_dir = require(&cfg.model_dir, "model_dir")?;
    cfg.annotation.validate()?;
    let reg_feature = cfg.regression_feature();
    let mut needs = Vec::new();
    if cfg.pipelines.classification() {
        needs.push(cfg.cls_feature);
    }
    if cfg.pipelines.regression() {
        needs.push(reg_feature);
    }
    let (train, stores) = load_run(cfg, &needs)?;
    let feats = stores.stores();

    let classification = if cfg.pipelines.classification() {
        let ccfg = ClassificationConfig {
            feature: cfg.cls_feature,
            annotation: cfg.annotation,
            svm: cfg.svm,
            parallel: cfg.parallel,
        };
        let sets = pipeline::annotate_dataset(&train, &cfg.annotation)?;
        writeln!(out, "slot\tclass1\tclass2\tclass3\tclass4\tclass5")?;
        for (i, h) in pipeline::slot_histograms(&sets).iter().enumerate() {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}",
                i + 1,
                h[0],
                h[1],
                h[2],
                h[3],
                h[4]
            )?;
        }
        Some(pipeline::train_classification(&train, feats, &ccfg)?)
    } else {
        None
    };
    let regression = if cfg.pipelines.regression() {
        Some(pipeline::train_regression(
            &train,
            reg_feature,
            feats,
            cfg.lambda,
        )?)
    } else {
        None
    };
    let models = TrainedModels {
        classification,
        regression,
        ensemble: cfg.ensemble,
    };
    models.save(model_dir)?;
    fs::write(model_dir.join(RUN_CONFIG_FILE), cfg.to_kv())?;
    writeln!(out, "wrote models to {}", model_dir.display())?;

    if let Some(val) = &cfg.val {
        let val = read_dataset(val, true)?;
        let preds = val
            .instances()
            .iter()
            .map(|i| models.predict(i, feats))
            .collect::<Result<Vec<_>, _>>()?;
        let gold: Vec<f64> = val.instances().iter().filter_map(|i| i.gold).collect();
        let report = MetricsReport::compute(&preds, &gold)?;
        writeln!(out, "validation\t{}", report.to_json())?;
    }
    Ok(models)
}

pub fn cmd_predict(cfg: &RunConfig) -> Result<usize> {
    let model_dir = require(&cfg.model_dir, "model_dir")?;
    let input = require(&cfg.input, "in")?;
    let output = require(&cfg.output, "out")?;
    let models = TrainedModels::load(model_dir)?;
    let mut needs = Vec::new();
    if let Some(b) = &models.classification {
        needs.push(b.feature);
    }
    if let Some(r) = &models.regression {
        needs.push(r.feature);
    }
    let stores = LoadedStores::load(cfg, &needs)?;
    let data = read_dataset(input, false)?;
    let mut out = create(output)?;
    for inst in data.instances() {
        let p = models.predict(inst, stores.stores())?;
        writeln!(out, "{}\t{}", inst.id, format_score(p))?;
    }
    out.flush()?;
    Ok(data.len())
}

/// Reads `id<TAB>prediction` rows; a leading non-numeric row is a header.
pub fn read_predictions<R: BufRead>(reader: R) -> Result<Vec<(String, f64)>> {
    let mut rows = Vec::new();
    let mut seen = HashMap::new();
    let mut first = true;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (id, v) = line
            .split_once('\t')
            .ok_or_else(|| anyhow!("line {}: expected id<TAB>prediction", i + 1))?;
        let is_first = std::mem::take(&mut first);
        let v = match v.trim().parse::<f64>() {
            Ok(v) => v,
            Err(_) if is_first => continue,
            Err(_) => bail!("line {}: prediction `{}` is not a number", i + 1, v.trim()),
        };
        let id = id.trim().to_string();
        if seen.insert(id.clone(), i).is_some() {
            bail!("line {}: duplicate id `{id}`", i + 1);
        }
        rows.push((id, v));
    }
    Ok(rows)
}

pub fn cmd_evaluate(pred: &Path, gold: &Path) -> Result<MetricsReport> {
    let preds =
        read_predictions(open(pred)?).with_context(|| format!("parsing {}", pred.display()))?;
    let gold = read_dataset(gold, true)?;
    let by_id: HashMap<&str, f64> = preds.iter().map(|(id, v)| (id.as_str(), *v)).collect();

    let mut p = Vec::new();
    let mut g = Vec::new();
    let mut missing = Vec::new();
    for inst in gold.instances() {
        match by_id.get(inst.id.as_str()) {
            Some(&v) => {
                p.push(v);
                g.push(inst.gold.expect("labeled parse"));
            }
            None => missing.push(inst.id.as_str()),
        }
    }
    let extra: Vec<&str> = preds
        .iter()
        .map(|(id, _)| id.as_str())
        .filter(|id| gold.get(id).is_none())
        .collect();
    if p.is_empty() {
        bail!("no prediction ids match the gold file");
    }
    if !missing.is_empty() {
        bail!("no prediction for gold id(s): {}", missing.join(", "));
    }
    if !extra.is_empty() {
        bail!("prediction id(s) absent from gold: {}", extra.join(", "));
    }
    Ok(MetricsReport::compute(&p, &g)?)
}

pub fn cmd_gen_annotations(cfg: &RunConfig) -> Result<()> {
    let input = require(&cfg.input, "in")?;
    let output = require(&cfg.output, "out")?;
    let data = read_dataset(input, true)?;
    let mut out = create(output)?;
    if data.is_empty() {
        out.flush()?;
        return Ok(());
    }
    let sets = pipeline::annotate_dataset(&data, &cfg.annotation)?;
    for (inst, set) in data.instances().iter().zip(&sets) {
        let labels: Vec<String> = set.labels().iter().map(ToString::to_string).collect();
        writeln!(
            out,
            "{}\t{}\t{}",
            inst.id,
            inst.gold.expect("labeled parse"),
            labels.join(",")
        )?;
    }
    out.flush()?;
    Ok(())
}

pub fn cmd_export_manifest(model_dir: &Path, output: Option<&Path>) -> Result<String> {
    let manifest = pipeline::read_manifest(model_dir)?;
    let text = serde_json::to_string_pretty(&manifest)? + "\n";
    if let Some(path) = output {
        fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(text)
}

/// Runs a parsed command line. `env_seed` is the value of `LEXCOMP_SEED`.
pub fn run(cli: Cli, env_seed: Option<&str>) -> Result<()> {
    let stdout = std::io::stdout();
    let mut stdout = stdout.lock();
    let config = cli.config.as_deref();
    match cli.command {
        Command::Preprocess { input, output } => cmd_preprocess(&input, &output),
        Command::Train(args) => {
            let cfg = resolve_config(None, config, env_seed, &args)?;
            cmd_train(&cfg, &mut stdout).map(|_| ())
        }
        Command::Predict(args) => {
            let base = args
                .model_dir
                .as_ref()
                .map(|d| d.join(RUN_CONFIG_FILE))
                .filter(|p| p.exists());
            let cfg = resolve_config(base.as_deref(), config, env_seed, &args)?;
            let n = cmd_predict(&cfg)?;
            info!("wrote {n} predictions");
            Ok(())
        }
        Command::Evaluate { pred, gold, json } => {
            let report = cmd_evaluate(&pred, &gold)?;
            if json {
                writeln!(stdout, "{}", report.to_json())?;
            } else {
                write!(stdout, "{}", report.to_tsv())?;
            }
            Ok(())
        }
        Command::GenAnnotations(args) => {
            let cfg = resolve_config(None, config, env_seed, &args)?;
            cmd_gen_annotations(&cfg)
        }
        Command::ExportManifest { model_dir, output } => {
            let text = cmd_export_manifest(&model_dir, output.as_deref())?;
            if output.is_none() {
                write!(stdout, "{text}")?;
            }
            Ok(())
        }
    }
}
