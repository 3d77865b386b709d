#![allow(dead_code)]

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use lexcomp::corpus::{self, CorpusTag, Dataset, Instance};
use lexcomp::embeddings::WordVecStore;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DIM: usize = 8;

/// Synthetic corpus where every target is a distinct word with its own
/// random vector and gold `c = logistic(w·x)` rounded to three decimals.
pub struct Synthetic {
    pub train: Dataset,
    pub test: Dataset,
    pub glove: WordVecStore,
    pub glove_text: String,
    pub weights: Vec<f64>,
}

fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

pub fn synthetic(seed: u64, n_train: usize, n_test: usize) -> Synthetic {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half_width = 3f64.sqrt();
    let weights: Vec<f64> = (0..DIM).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut glove = WordVecStore::new(DIM).unwrap();
    let mut glove_text = String::new();
    let mut rows = Vec::with_capacity(n_train + n_test);
    for i in 0..n_train + n_test {
        let word = format!("w{i:04}");
        let x: Vec<f64> = (0..DIM)
            .map(|_| rng.gen_range(-half_width..half_width))
            .collect();
        let z: f64 = x.iter().zip(&weights).map(|(a, b)| a * b).sum();
        let c = (logistic(z).clamp(0.0, 1.0) * 1000.0).round() / 1000.0;
        write!(glove_text, "{word}").unwrap();
        for v in &x {
            write!(glove_text, " {v:?}").unwrap();
        }
        glove_text.push('\n');
        glove.insert(word.clone(), x).unwrap();
        rows.push(Instance {
            id: format!("s{i:04}"),
            corpus: CorpusTag::Bible,
            sentence: format!("the {word} was written here"),
            target: word,
            gold: Some(c),
        });
    }
    let test = rows.split_off(n_train);
    Synthetic {
        train: Dataset::new(rows).unwrap(),
        test: Dataset::new(test).unwrap(),
        glove,
        glove_text,
        weights,
    }
}

impl Synthetic {
    /// Writes `train.tsv`, `test.tsv` and `glove.txt` into `dir`.
    pub fn write_to(&self, dir: &Path) {
        let mut buf = Vec::new();
        corpus::write_tsv(&self.train, &mut buf, true).unwrap();
        fs::write(dir.join("train.tsv"), &buf).unwrap();
        buf.clear();
        corpus::write_tsv(&self.test, &mut buf, true).unwrap();
        fs::write(dir.join("test.tsv"), &buf).unwrap();
        fs::write(dir.join("glove.txt"), &self.glove_text).unwrap();
    }
}

pub fn golds(data: &Dataset) -> Vec<f64> {
    data.instances().iter().map(|i| i.gold.unwrap()).collect()
}
