//! Lexical complexity prediction.
//!
//! Two pipelines estimate how hard a target word (or two-word expression) is
//! in its sentence, as a score in `[0, 1]`:
//!
//! * a classification pipeline that expands each gold score into a sorted set
//!   of simulated annotator labels, trains one RBF-kernel SVM per annotator
//!   slot, and averages the slots' predicted labels back into a score;
//! * a regression pipeline that fits a ridge-regularized linear model on word
//!   or contextual embeddings.
//!
//! Their predictions are combined by a weighted mean. The crate also covers the
//! CompLex-style TSV format, GloVe and contextual embedding stores, the token
//! alignment used to pool sub-token vectors, and the evaluation metrics.

pub mod align;
pub mod annotate;
pub mod cli;
pub mod corpus;
pub mod embeddings;
mod error;
pub mod linreg;
pub mod metrics;
pub mod pipeline;
pub mod svm;
mod util;

pub use error::{Error, Result};
