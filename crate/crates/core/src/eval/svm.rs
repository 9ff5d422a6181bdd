//! One-vs-rest linear SVM trained with Pegasos-style subgradient steps.
//!
//! Features are standardized with statistics from the training data and
//! augmented with a constant 1, so the bias is learned (and regularized)
//! like any other weight. Every class walks the same shuffled sample order,
//! drawn once per epoch from the seed.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmConfig {
    pub c: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        Self {
            c: 1.0,
            epochs: 200,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSvmModel {
    /// Sorted class labels; row `k` of `weights` scores `classes[k]`.
    pub classes: Vec<String>,
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<f64>,
    /// Standardization applied to inputs before scoring.
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
    pub config: SvmConfig,
}

impl LinearSvmModel {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn decision_values(&self, x: &[f64]) -> Vec<f64> {
        let z: Vec<f64> = x
            .iter()
            .zip(&self.mean)
            .zip(&self.scale)
            .map(|((v, m), s)| (v - m) / s)
            .collect();
        self.weights
            .iter()
            .zip(&self.biases)
            .map(|(w, b)| dot(w, &z) + b)
            .collect()
    }

    /// Highest-scoring class; ties go to the first class in sorted order.
    pub fn predict(&self, x: &[f64]) -> &str {
        let scores = self.decision_values(x);
        let mut best = 0;
        for (k, s) in scores.iter().enumerate() {
            if *s > scores[best] {
                best = k;
            }
        }
        &self.classes[best]
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn standardization(features: &[&[f64]], dim: usize) -> (Vec<f64>, Vec<f64>) {
    let n = features.len() as f64;
    let mut mean = vec![0.0; dim];
    for x in features {
        for (m, v) in mean.iter_mut().zip(*x) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut scale = vec![0.0; dim];
    for x in features {
        for ((s, v), m) in scale.iter_mut().zip(*x).zip(&mean) {
            *s += (v - m) * (v - m);
        }
    }
    for s in &mut scale {
        *s = (*s / n).sqrt();
        if *s <= f64::EPSILON {
            *s = 1.0;
        }
    }
    (mean, scale)
}

pub fn train_linear_svm<S: AsRef<str>>(
    features: &[&[f64]],
    labels: &[S],
    config: &SvmConfig,
) -> Result<LinearSvmModel> {
    if features.len() != labels.len() {
        return Err(Error::Shape(format!(
            "{} feature vectors but {} labels",
            features.len(),
            labels.len()
        )));
    }
    if !(config.c.is_finite() && config.c > 0.0) {
        return Err(Error::Invalid(format!(
            "SVM C must be positive, got {}",
            config.c
        )));
    }
    let Some(first) = features.first() else {
        return Err(Error::Empty("no training samples".into()));
    };
    let dim = first.len();
    if dim == 0 || features.iter().any(|x| x.len() != dim) {
        return Err(Error::Shape(
            "training vectors must share a nonzero dimension".into(),
        ));
    }

    let mut index: BTreeMap<&str, usize> = labels.iter().map(|l| (l.as_ref(), 0)).collect();
    if index.len() < 2 {
        return Err(Error::Degenerate(format!(
            "training data has {} class(es); need at least 2",
            index.len()
        )));
    }
    for (k, v) in index.values_mut().enumerate() {
        *v = k;
    }
    let classes: Vec<String> = index.keys().map(|s| s.to_string()).collect();
    let targets: Vec<usize> = labels.iter().map(|l| index[l.as_ref()]).collect();

    let (mean, scale) = standardization(features, dim);
    // Standardized rows with a trailing constant for the bias.
    let rows: Vec<Vec<f64>> = features
        .iter()
        .map(|x| {
            let mut z: Vec<f64> = x
                .iter()
                .zip(&mean)
                .zip(&scale)
                .map(|((v, m), s)| (v - m) / s)
                .collect();
            z.push(1.0);
            z
        })
        .collect();

    let n = rows.len();
    let lambda = 1.0 / (config.c * n as f64);
    let radius = 1.0 / lambda.sqrt();
    let mut weights = vec![vec![0.0; dim + 1]; classes.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut t = 0usize;
    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            t += 1;
            let eta = 1.0 / (lambda * t as f64);
            let shrink = 1.0 - eta * lambda;
            let x = &rows[i];
            for (k, w) in weights.iter_mut().enumerate() {
                let y = if targets[i] == k { 1.0 } else { -1.0 };
                let margin = y * dot(w, x);
                w.iter_mut().for_each(|v| *v *= shrink);
                if margin < 1.0 {
                    for (v, xi) in w.iter_mut().zip(x) {
                        *v += eta * y * xi;
                    }
                }
                let norm = dot(w, w).sqrt();
                if norm > radius {
                    let f = radius / norm;
                    w.iter_mut().for_each(|v| *v *= f);
                }
            }
        }
    }

    let biases = weights.iter_mut().map(|w| w.pop().unwrap()).collect();
    Ok(LinearSvmModel {
        classes,
        weights,
        biases,
        mean,
        scale,
        config: *config,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn separable_1d() {
        let xs = [[-1.0], [-1.2], [-0.8], [1.0], [1.1], [0.9]];
        let features: Vec<&[f64]> = xs.iter().map(|x| &x[..]).collect();
        let labels = ["neg", "neg", "neg", "pos", "pos", "pos"];
        let model = train_linear_svm(&features, &labels, &SvmConfig::default()).unwrap();
        for (x, l) in features.iter().zip(labels) {
            assert_eq!(model.predict(x), l);
        }
        assert_eq!(model.predict(&[-5.0]), "neg");
        assert_eq!(model.predict(&[5.0]), "pos");
    }

    #[test]
    fn single_class_is_degenerate() {
        let features: Vec<&[f64]> = vec![&[1.0], &[2.0]];
        assert!(matches!(
            train_linear_svm(&features, &["a", "a"], &SvmConfig::default()),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn deterministic_given_seed() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let xs: Vec<Vec<f64>> = (0..30)
            .map(|_| (0..3).map(|_| rng.sample(StandardNormal)).collect())
            .collect();
        let labels: Vec<&str> = (0..30).map(|i| ["a", "b", "c"][i % 3]).collect();
        let features: Vec<&[f64]> = xs.iter().map(|x| &x[..]).collect();
        let cfg = SvmConfig {
            seed: 7,
            ..SvmConfig::default()
        };
        let a = train_linear_svm(&features, &labels, &cfg).unwrap();
        let b = train_linear_svm(&features, &labels, &cfg).unwrap();
        assert_eq!(a, b);
        let c = train_linear_svm(&features, &labels, &SvmConfig { seed: 8, ..cfg }).unwrap();
        assert_ne!(a.weights, c.weights);
    }

    #[test]
    fn constant_feature_is_harmless() {
        let xs = [[0.0, 3.0], [0.1, 3.0], [2.0, 3.0], [2.1, 3.0]];
        let features: Vec<&[f64]> = xs.iter().map(|x| &x[..]).collect();
        let model =
            train_linear_svm(&features, &["a", "a", "b", "b"], &SvmConfig::default()).unwrap();
        assert_eq!(model.scale[1], 1.0);
        assert_eq!(model.predict(&[0.05, 3.0]), "a");
        assert_eq!(model.predict(&[2.05, 3.0]), "b");
    }
}
