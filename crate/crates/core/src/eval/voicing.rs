//! Voicing score: within one speaker or voice, consonants that differ only in
//! voicing or nasality should sit closer together than consonants that
//! differ in place or manner.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::targets::TargetTable;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoicingSpec {
    /// Label pairs differing only by voicing or nasality, e.g. `("b", "p")`.
    pub anchor_pairs: Vec<(String, String)>,
    /// Labels differing from the anchors (and each other) in place or manner.
    pub contrast_labels: Vec<String>,
    /// Restrict scoring to one set; all sets otherwise.
    #[serde(default)]
    pub set_id: Option<String>,
}

impl VoicingSpec {
    pub fn validate(&self) -> Result<()> {
        if self.anchor_pairs.is_empty() {
            return Err(Error::Invalid("voicing spec has no anchor pairs".into()));
        }
        if self.contrast_labels.is_empty() {
            return Err(Error::Invalid("voicing spec has no contrast labels".into()));
        }
        for (a, b) in &self.anchor_pairs {
            if a == b {
                return Err(Error::Invalid(format!(
                    "anchor pair ({a:?}, {b:?}) repeats a label"
                )));
            }
            if self.contrast_labels.contains(a) && self.contrast_labels.contains(b) {
                return Err(Error::Invalid(format!(
                    "anchor pair ({a:?}, {b:?}) is also a contrast pair"
                )));
            }
        }
        Ok(())
    }

    fn labels(&self) -> BTreeSet<&str> {
        self.anchor_pairs
            .iter()
            .flat_map(|(a, b)| [a.as_str(), b.as_str()])
            .chain(self.contrast_labels.iter().map(String::as_str))
            .collect()
    }

    /// Unordered label pairs with at least one contrast label, excluding
    /// anchor pairs, in sorted order.
    pub fn contrast_pairs(&self) -> Vec<(String, String)> {
        let anchors: BTreeSet<(&str, &str)> = self
            .anchor_pairs
            .iter()
            .map(|(a, b)| (a.as_str().min(b.as_str()), a.as_str().max(b.as_str())))
            .collect();
        let contrasts: BTreeSet<&str> = self.contrast_labels.iter().map(String::as_str).collect();
        let labels: Vec<&str> = self.labels().into_iter().collect();
        let mut out = Vec::new();
        for (i, a) in labels.iter().enumerate() {
            for b in &labels[i + 1..] {
                if (contrasts.contains(a) || contrasts.contains(b)) && !anchors.contains(&(*a, *b))
                {
                    out.push((a.to_string(), b.to_string()));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitScore {
    pub set_id: String,
    pub speaker: String,
    pub d_max: f64,
    pub correct: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoicingReport {
    pub voicing_score: f64,
    pub correct: usize,
    pub total: usize,
    pub units: Vec<UnitScore>,
}

/// Per label: running sum of target vectors and their count.
type Centroids<'a> = BTreeMap<&'a str, (Vec<f64>, usize)>;

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Scores every (set, speaker) unit that has targets for the spec's labels.
///
/// Several targets for one label within a unit are averaged. A contrast
/// pair closer than the unit's largest anchor-pair distance counts as an
/// error. Units holding none of the spec's labels are skipped; units holding
/// only some of them are an error.
pub fn voicing_score(table: &TargetTable, spec: &VoicingSpec) -> Result<VoicingReport> {
    spec.validate()?;
    let wanted = spec.labels();
    let mut units: BTreeMap<(&str, &str), Centroids> = BTreeMap::new();
    for r in &table.rows {
        if spec.set_id.as_ref().is_some_and(|s| s != &r.set_id)
            || !wanted.contains(r.label.as_str())
        {
            continue;
        }
        let centroids = units
            .entry((r.set_id.as_str(), r.speaker.as_str()))
            .or_default();
        let (sum, n) = centroids
            .entry(r.label.as_str())
            .or_insert_with(|| (vec![0.0; r.vector.len()], 0));
        for (s, v) in sum.iter_mut().zip(&r.vector) {
            *s += v;
        }
        *n += 1;
    }
    if units.is_empty() {
        return Err(Error::Empty(
            "no targets carry the voicing spec's labels".into(),
        ));
    }

    let pairs = spec.contrast_pairs();
    let mut scores = Vec::new();
    for ((set_id, speaker), centroids) in &units {
        if let Some(missing) = wanted.iter().find(|l| !centroids.contains_key(*l)) {
            return Err(Error::MissingLabel {
                unit: format!("{set_id}/{speaker}"),
                label: missing.to_string(),
            });
        }
        let centroid = |label: &str| -> Vec<f64> {
            let (sum, n) = &centroids[label];
            sum.iter().map(|s| s / *n as f64).collect()
        };
        let d_max = spec
            .anchor_pairs
            .iter()
            .map(|(a, b)| euclidean(&centroid(a), &centroid(b)))
            .fold(0.0, f64::max);
        let correct = pairs
            .iter()
            .filter(|(a, b)| euclidean(&centroid(a), &centroid(b)) >= d_max)
            .count();
        scores.push(UnitScore {
            set_id: set_id.to_string(),
            speaker: speaker.to_string(),
            d_max,
            correct,
            total: pairs.len(),
        });
    }
    let correct = scores.iter().map(|u| u.correct).sum();
    let total = scores.iter().map(|u| u.total).sum();
    Ok(VoicingReport {
        voicing_score: correct as f64 / total as f64,
        correct,
        total,
        units: scores,
    })
}
