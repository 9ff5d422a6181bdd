use std::collections::BTreeMap;

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dtw::{dtw, CostMetric};
use crate::error::{Error, Result};
use crate::featio::FeatureTrajectory;

/// A trajectory tagged with the speaker who produced it.
#[derive(Debug, Clone, Copy)]
pub struct SpeakerSample<'a> {
    pub speaker: &'a str,
    pub trajectory: &'a FeatureTrajectory,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityMatrix {
    pub labels: Vec<String>,
    /// Row-major `labels.len()` x `labels.len()` values.
    pub values: Vec<Vec<f64>>,
}

/// Mean cosine similarity along the DTW path, averaged over both alignment
/// directions.
fn pair_similarity(a: &FeatureTrajectory, b: &FeatureTrajectory) -> Result<f64> {
    let ab = dtw(a, b, CostMetric::CosineDistance)?
        .mean_similarity()
        .unwrap();
    let ba = dtw(b, a, CostMetric::CosineDistance)?
        .mean_similarity()
        .unwrap();
    Ok(0.5 * (ab + ba))
}

/// Label x label matrix of DTW-aligned cosine similarity, averaged over all
/// sample pairs drawn from different speakers. Labels are ordered by the
/// map's key order; the upper triangle is computed and mirrored.
pub fn similarity_matrix(
    groups: &BTreeMap<String, Vec<SpeakerSample<'_>>>,
) -> Result<SimilarityMatrix> {
    if groups.len() < 2 {
        return Err(Error::Invalid(
            "similarity matrix needs at least two labels".into(),
        ));
    }
    if let Some((label, _)) = groups.iter().find(|(_, v)| v.is_empty()) {
        return Err(Error::Empty(format!("label {label:?} has no samples")));
    }
    let labels: Vec<&String> = groups.keys().collect();
    let n = labels.len();
    let cells: Vec<(usize, usize)> = (0..n).flat_map(|a| (a..n).map(move |b| (a, b))).collect();

    let values: Vec<f64> = cells
        .par_iter()
        .map(|&(a, b)| {
            let (ga, gb) = (&groups[labels[a]], &groups[labels[b]]);
            let mut sum = 0.0;
            let mut count = 0usize;
            for (ia, sa) in ga.iter().enumerate() {
                for (ib, sb) in gb.iter().enumerate() {
                    // Within one label, visit each unordered pair once.
                    if (a == b && ib <= ia) || sa.speaker == sb.speaker {
                        continue;
                    }
                    sum += pair_similarity(sa.trajectory, sb.trajectory)?;
                    count += 1;
                }
            }
            if count == 0 {
                return Err(Error::Invalid(format!(
                    "labels {:?} and {:?} have no cross-speaker sample pairs",
                    labels[a], labels[b]
                )));
            }
            Ok(sum / count as f64)
        })
        .collect::<Result<_>>()?;

    let mut m = Array2::zeros((n, n));
    for (&(a, b), v) in cells.iter().zip(values) {
        m[[a, b]] = v;
        m[[b, a]] = v;
    }
    Ok(SimilarityMatrix {
        labels: labels.into_iter().cloned().collect(),
        values: m.rows().into_iter().map(|r| r.to_vec()).collect(),
    })
}
