use thiserror::Error;

use crate::{align, annotate, corpus, embeddings, linreg, metrics, pipeline, svm};

/// Umbrella error for callers that mix several modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Corpus(#[from] corpus::CorpusError),
    #[error(transparent)]
    Embeddings(#[from] embeddings::EmbeddingError),
    #[error(transparent)]
    Align(#[from] align::AlignError),
    #[error(transparent)]
    Annotate(#[from] annotate::AnnotateError),
    #[error(transparent)]
    Svm(#[from] svm::SvmError),
    #[error(transparent)]
    Linreg(#[from] linreg::LinregError),
    #[error(transparent)]
    Pipeline(#[from] pipeline::PipelineError),
    #[error(transparent)]
    Metrics(#[from] metrics::MetricsError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
