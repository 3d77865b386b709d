//! Feature extraction, the annotator-slot classifier bank, the embedding
//! regression and their ensemble.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annotate::{self, AnnotateError, AnnotationConfig, AnnotationSet, GridLabel};
use crate::corpus::{Dataset, Instance};
use crate::embeddings::{CtxStore, EmbeddingError, WordVecStore};
use crate::linreg::{self, LinModel, LinregError};
use crate::svm::{self, MulticlassSvm, SvmError, SvmParams};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("feature source `{source_kind}` needs a {store} store")]
    MissingStore {
        source_kind: FeatureSource,
        store: &'static str,
    },
    #[error("instance {0} has no gold complexity")]
    Unlabeled(String),
    #[error("empty dataset")]
    EmptyDataset,
    #[error("instance {id}: {source}")]
    Feature {
        id: String,
        #[source]
        source: EmbeddingError,
    },
    #[error("instance {id}: {source}")]
    Annotate {
        id: String,
        #[source]
        source: AnnotateError,
    },
    #[error("slot {slot}: {source}")]
    Svm {
        slot: usize,
        #[source]
        source: SvmError,
    },
    #[error(transparent)]
    Linreg(#[from] LinregError),
    #[error("feature dimension {found} does not match model dimension {expected}")]
    DimMismatch { expected: usize, found: usize },
    #[error("ensemble weights must be non-negative with a positive sum")]
    BadWeights,
    #[error("model directory: {0}")]
    Persist(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureSource {
    Glove,
    Contextual,
    Concat,
}

impl fmt::Display for FeatureSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FeatureSource::Glove => "glove",
            FeatureSource::Contextual => "contextual",
            FeatureSource::Concat => "concat",
        })
    }
}

impl FromStr for FeatureSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "glove" => Ok(FeatureSource::Glove),
            "contextual" => Ok(FeatureSource::Contextual),
            "concat" => Ok(FeatureSource::Concat),
            other => Err(format!("unknown feature source `{other}`")),
        }
    }
}

/// Borrowed embedding stores available to feature extraction.
#[derive(Debug, Clone, Copy, Default)]
pub struct FeatureStores<'a> {
    pub glove: Option<&'a WordVecStore>,
    pub ctx: Option<&'a CtxStore>,
}

impl<'a> FeatureStores<'a> {
    pub fn new(glove: Option<&'a WordVecStore>, ctx: Option<&'a CtxStore>) -> Self {
        Self { glove, ctx }
    }

    fn glove(&self, source: FeatureSource) -> Result<&'a WordVecStore, PipelineError> {
        self.glove.ok_or(PipelineError::MissingStore {
            source_kind: source,
            store: "glove",
        })
    }

    fn ctx(&self, source: FeatureSource) -> Result<&'a CtxStore, PipelineError> {
        self.ctx.ok_or(PipelineError::MissingStore {
            source_kind: source,
            store: "contextual",
        })
    }

    /// Output length of [`featurize`] for `source`.
    pub fn dim(&self, source: FeatureSource) -> Result<usize, PipelineError> {
        Ok(match source {
            FeatureSource::Glove => self.glove(source)?.dim(),
            FeatureSource::Contextual => self.ctx(source)?.dim(),
            FeatureSource::Concat => self.glove(source)?.dim() + self.ctx(source)?.dim(),
        })
    }
}

fn contextual(instance: &Instance, ctx: &CtxStore) -> Result<Vec<f64>, EmbeddingError> {
    let record = ctx
        .get(&instance.id)
        .ok_or_else(|| EmbeddingError::MissingId(instance.id.clone()))?;
    match &record.target_tokens {
        Some(needle) => ctx.context_vector(&instance.id, needle),
        None => {
            let words: Vec<&str> = instance.target_words().collect();
            ctx.context_vector(&instance.id, &words)
        }
    }
}

/// Feature vector for one instance.
pub fn featurize(
    instance: &Instance,
    source: FeatureSource,
    stores: FeatureStores<'_>,
) -> Result<Vec<f64>, PipelineError> {
    let wrap = |source| PipelineError::Feature {
        id: instance.id.clone(),
        source,
    };
    match source {
        FeatureSource::Glove => stores
            .glove(source)?
            .lookup_token(&instance.target)
            .map_err(wrap),
        FeatureSource::Contextual => contextual(instance, stores.ctx(source)?).map_err(wrap),
        FeatureSource::Concat => {
            let glove = stores.glove(source)?;
            let ctx = stores.ctx(source)?;
            let mut v = glove.lookup_token(&instance.target).map_err(wrap)?;
            v.extend(contextual(instance, ctx).map_err(wrap)?);
            Ok(v)
        }
    }
}

fn featurize_all(
    data: &Dataset,
    source: FeatureSource,
    stores: FeatureStores<'_>,
) -> Result<Vec<Vec<f64>>, PipelineError> {
    data.instances()
        .iter()
        .map(|i| featurize(i, source, stores))
        .collect()
}

fn gold_values(data: &Dataset) -> Result<Vec<f64>, PipelineError> {
    if data.is_empty() {
        return Err(PipelineError::EmptyDataset);
    }
    data.instances()
        .iter()
        .map(|i| i.gold.ok_or_else(|| PipelineError::Unlabeled(i.id.clone())))
        .collect()
}

/// Sorted dummy annotation sets for every instance, drawn in dataset order from
/// one generator seeded with `cfg.seed`.
pub fn annotate_dataset(
    data: &Dataset,
    cfg: &AnnotationConfig,
) -> Result<Vec<AnnotationSet>, PipelineError> {
    let gold = gold_values(data)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    data.instances()
        .iter()
        .zip(gold)
        .map(|(inst, c)| {
            annotate::generate_annotations_with(c, cfg, &mut rng).map_err(|source| {
                PipelineError::Annotate {
                    id: inst.id.clone(),
                    source,
                }
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassificationConfig {
    pub feature: FeatureSource,
    pub annotation: AnnotationConfig,
    pub svm: SvmParams,
    /// Train slots on the rayon pool. Results are identical either way.
    pub parallel: bool,
}

impl Default for ClassificationConfig {
    fn default() -> Self {
        Self {
            feature: FeatureSource::Glove,
            annotation: AnnotationConfig::default(),
            svm: SvmParams::default(),
            parallel: true,
        }
    }
}

/// One multiclass SVM per annotator slot; slot 0 models the lowest-scoring
/// annotator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierBank {
    pub slots: Vec<MulticlassSvm>,
    pub annotation: AnnotationConfig,
    pub feature: FeatureSource,
    pub dim: usize,
}

impl ClassifierBank {
    /// Score for a precomputed feature vector: the mean of the slots' labels.
    pub fn predict_features(&self, x: &[f64]) -> Result<f64, PipelineError> {
        if x.len() != self.dim {
            return Err(PipelineError::DimMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        let labels = self
            .slots
            .iter()
            .enumerate()
            .map(|(slot, m)| {
                let class = m
                    .predict_class(x)
                    .map_err(|source| PipelineError::Svm { slot, source })?;
                GridLabel::from_categorical(class).map_err(|source| PipelineError::Annotate {
                    id: format!("slot {slot}"),
                    source,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        annotate::aggregate(&labels).map_err(|source| PipelineError::Annotate {
            id: "bank".into(),
            source,
        })
    }

    pub fn predict(
        &self,
        instance: &Instance,
        stores: FeatureStores<'_>,
    ) -> Result<f64, PipelineError> {
        self.predict_features(&featurize(instance, self.feature, stores)?)
    }
}

/// Trains the annotator-slot bank.
pub fn train_classification(
    data: &Dataset,
    stores: FeatureStores<'_>,
    cfg: &ClassificationConfig,
) -> Result<ClassifierBank, PipelineError> {
    let sets = annotate_dataset(data, &cfg.annotation)?;
    let features = featurize_all(data, cfg.feature, stores)?;
    let dim = features[0].len();
    let n = cfg.annotation.n;

    let slot_labels: Vec<Vec<u8>> = (0..n)
        .map(|slot| {
            sets.iter()
                .map(|s| s.labels()[slot].to_categorical())
                .collect()
        })
        .collect();
    let train_slot = |(slot, labels): (usize, &Vec<u8>)| {
        svm::train_multiclass(&features, labels, &cfg.svm)
            .map_err(|source| PipelineError::Svm { slot, source })
    };
    let slots = if cfg.parallel {
        slot_labels
            .par_iter()
            .enumerate()
            .map(train_slot)
            .collect::<Result<Vec<_>, _>>()?
    } else {
        slot_labels
            .iter()
            .enumerate()
            .map(train_slot)
            .collect::<Result<Vec<_>, _>>()?
    };

    Ok(ClassifierBank {
        slots,
        annotation: cfg.annotation,
        feature: cfg.feature,
        dim,
    })
}

/// Per-slot counts of training labels, indexed by class id − 1.
pub fn slot_histograms(sets: &[AnnotationSet]) -> Vec<[usize; 5]> {
    let n = sets.first().map_or(0, AnnotationSet::n);
    let mut hist = vec![[0usize; 5]; n];
    for s in sets {
        for (slot, l) in s.labels().iter().enumerate() {
            hist[slot][l.index() as usize] += 1;
        }
    }
    hist
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionModel {
    pub model: LinModel,
    pub feature: FeatureSource,
}

impl RegressionModel {
    pub fn predict(
        &self,
        instance: &Instance,
        stores: FeatureStores<'_>,
    ) -> Result<f64, PipelineError> {
        let x = featurize(instance, self.feature, stores)?;
        if x.len() != self.model.dim() {
            return Err(PipelineError::DimMismatch {
                expected: self.model.dim(),
                found: x.len(),
            });
        }
        Ok(self.model.predict(&x)?)
    }
}

pub fn train_regression(
    data: &Dataset,
    source: FeatureSource,
    stores: FeatureStores<'_>,
    lambda: f64,
) -> Result<RegressionModel, PipelineError> {
    let gold = gold_values(data)?;
    let features = featurize_all(data, source, stores)?;
    Ok(RegressionModel {
        model: linreg::fit(&features, &gold, lambda)?,
        feature: source,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub w_reg: f64,
    pub w_cls: f64,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self {
            w_reg: 0.5,
            w_cls: 0.5,
        }
    }
}

/// Weighted mean of the two pipeline scores.
pub fn predict_ensemble(
    p_reg: f64,
    p_cls: f64,
    cfg: &EnsembleConfig,
) -> Result<f64, PipelineError> {
    let EnsembleConfig { w_reg, w_cls } = *cfg;
    if !(w_reg >= 0.0 && w_cls >= 0.0 && w_reg + w_cls > 0.0) {
        return Err(PipelineError::BadWeights);
    }
    Ok((w_reg * p_reg + w_cls * p_cls) / (w_reg + w_cls))
}

const MANIFEST: &str = "manifest.json";
const REGRESSION_FILE: &str = "regression.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationManifest {
    pub annotation: AnnotationConfig,
    pub feature: FeatureSource,
    pub dim: usize,
    pub slot_files: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionManifest {
    pub feature: FeatureSource,
    pub dim: usize,
    pub file: String,
}

/// Index of a model directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub classification: Option<ClassificationManifest>,
    pub regression: Option<RegressionManifest>,
    pub ensemble: EnsembleConfig,
}

/// Trained pipelines as stored in a model directory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModels {
    pub classification: Option<ClassifierBank>,
    pub regression: Option<RegressionModel>,
    pub ensemble: EnsembleConfig,
}

fn slot_file(i: usize) -> String {
    format!("slot_{i:03}.json")
}

fn to_json<T: Serialize>(v: &T) -> Result<String, PipelineError> {
    serde_json::to_string_pretty(v).map_err(|e| PipelineError::Persist(e.to_string()))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, PipelineError> {
    let text = fs::read_to_string(path)
        .map_err(|e| PipelineError::Persist(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| PipelineError::Persist(format!("{}: {e}", path.display())))
}

impl TrainedModels {
    pub fn manifest(&self) -> Manifest {
        Manifest {
            format_version: 1,
            classification: self
                .classification
                .as_ref()
                .map(|b| ClassificationManifest {
                    annotation: b.annotation,
                    feature: b.feature,
                    dim: b.dim,
                    slot_files: (0..b.slots.len()).map(slot_file).collect(),
                }),
            regression: self.regression.as_ref().map(|r| RegressionManifest {
                feature: r.feature,
                dim: r.model.dim(),
                file: REGRESSION_FILE.into(),
            }),
            ensemble: self.ensemble,
        }
    }

    /// Writes `manifest.json`, one `slot_NNN.json` per classifier slot and
    /// `regression.json`.
    pub fn save(&self, dir: &Path) -> Result<(), PipelineError> {
        fs::create_dir_all(dir)?;
        if let Some(bank) = &self.classification {
            for (i, slot) in bank.slots.iter().enumerate() {
                fs::write(dir.join(slot_file(i)), to_json(slot)?)?;
            }
        }
        if let Some(reg) = &self.regression {
            fs::write(dir.join(REGRESSION_FILE), to_json(&reg.model)?)?;
        }
        fs::write(dir.join(MANIFEST), to_json(&self.manifest())?)?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self, PipelineError> {
        let manifest = read_manifest(dir)?;
        let classification = match manifest.classification {
            Some(m) => {
                let slots = m
                    .slot_files
                    .iter()
                    .map(|f| read_json::<MulticlassSvm>(&dir.join(f)))
                    .collect::<Result<Vec<_>, _>>()?;
                if slots.len() != m.annotation.n {
                    return Err(PipelineError::Persist(format!(
                        "{} slot files for n = {}",
                        slots.len(),
                        m.annotation.n
                    )));
                }
                Some(ClassifierBank {
                    slots,
                    annotation: m.annotation,
                    feature: m.feature,
                    dim: m.dim,
                })
            }
            None => None,
        };
        let regression = match manifest.regression {
            Some(m) => Some(RegressionModel {
                model: read_json(&dir.join(&m.file))?,
                feature: m.feature,
            }),
            None => None,
        };
        Ok(Self {
            classification,
            regression,
            ensemble: manifest.ensemble,
        })
    }

    /// Ensemble score when both pipelines are present, otherwise the score of
    /// whichever pipeline exists.
    pub fn predict(
        &self,
        instance: &Instance,
        stores: FeatureStores<'_>,
    ) -> Result<f64, PipelineError> {
        let cls = self
            .classification
            .as_ref()
            .map(|b| b.predict(instance, stores))
            .transpose()?;
        let reg = self
            .regression
            .as_ref()
            .map(|r| r.predict(instance, stores))
            .transpose()?;
        match (reg, cls) {
            (Some(r), Some(c)) => predict_ensemble(r, c, &self.ensemble),
            (Some(v), None) | (None, Some(v)) => Ok(v),
            (None, None) => Err(PipelineError::Persist("no trained pipeline".into())),
        }
    }
}

pub fn read_manifest(dir: &Path) -> Result<Manifest, PipelineError> {
    read_json(&dir.join(MANIFEST))
}
