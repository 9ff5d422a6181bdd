use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::svm::{train_linear_svm, SvmConfig};
use super::targets::{TargetRow, TargetTable};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetAccuracy {
    pub correct: usize,
    pub total: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LooReport {
    pub per_set: BTreeMap<String, SetAccuracy>,
    /// Mean of the per-set accuracies.
    pub macro_accuracy: f64,
    /// Correct predictions over all samples of all sets.
    pub pooled_accuracy: f64,
    /// Predicted label per sample id, in table order.
    pub predictions: Vec<(String, String)>,
}

/// Leave-one-out accuracy, each set evaluated as its own population: every
/// sample is predicted by a model trained on all other samples of its set,
/// across speakers.
pub fn loo_classification_accuracy(table: &TargetTable, config: &SvmConfig) -> Result<LooReport> {
    let sets = table.by_set();
    if sets.is_empty() {
        return Err(Error::Empty("target table has no rows".into()));
    }
    let mut per_set = BTreeMap::new();
    let mut predicted: HashMap<&str, String> = HashMap::new();
    for (set_id, rows) in &sets {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for r in rows {
            *counts.entry(r.label.as_str()).or_default() += 1;
        }
        if let Some((label, _)) = counts.iter().find(|(_, n)| **n < 2) {
            return Err(Error::Degenerate(format!(
                "set {set_id:?}: label {label:?} has a single sample; leave-one-out needs at least 2"
            )));
        }
        let folds = (0..rows.len())
            .into_par_iter()
            .map(|held| {
                let train: Vec<&TargetRow> = rows
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != held)
                    .map(|(_, r)| *r)
                    .collect();
                let features: Vec<&[f64]> = train.iter().map(|r| r.vector.as_slice()).collect();
                let labels: Vec<&str> = train.iter().map(|r| r.label.as_str()).collect();
                let model = train_linear_svm(&features, &labels, config)?;
                Ok(model.predict(&rows[held].vector).to_string())
            })
            .collect::<Result<Vec<String>>>()?;
        let correct = rows
            .iter()
            .zip(&folds)
            .filter(|(r, p)| &r.label == *p)
            .count();
        per_set.insert(
            set_id.to_string(),
            SetAccuracy {
                correct,
                total: rows.len(),
                accuracy: correct as f64 / rows.len() as f64,
            },
        );
        for (r, p) in rows.iter().zip(folds) {
            predicted.insert(r.id.as_str(), p);
        }
    }
    let macro_accuracy = per_set.values().map(|s| s.accuracy).sum::<f64>() / per_set.len() as f64;
    let correct: usize = per_set.values().map(|s| s.correct).sum();
    let pooled_accuracy = correct as f64 / table.rows.len() as f64;
    let predictions = table
        .rows
        .iter()
        .map(|r| (r.id.clone(), predicted.remove(r.id.as_str()).unwrap()))
        .collect();
    Ok(LooReport {
        per_set,
        macro_accuracy,
        pooled_accuracy,
        predictions,
    })
}

/// Copy of the table with labels permuted among the rows of each set, for
/// chance-level baselines.
pub fn shuffle_labels(table: &TargetTable, seed: u64) -> TargetTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = table.rows.clone();
    let mut by_set: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (k, r) in rows.iter().enumerate() {
        by_set.entry(r.set_id.clone()).or_default().push(k);
    }
    for indices in by_set.values() {
        let mut labels: Vec<String> = indices.iter().map(|&k| rows[k].label.clone()).collect();
        labels.shuffle(&mut rng);
        for (&k, l) in indices.iter().zip(labels) {
            rows[k].label = l;
        }
    }
    TargetTable { rows }
}
