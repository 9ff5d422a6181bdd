use serde::{Deserialize, Serialize};

use super::dtw::{dtw, CostMetric};
use crate::error::{Error, Result};
use crate::featio::FeatureTrajectory;

/// The frame at which a sample's averaged local cost peaks, with the
/// sample's channel values at that frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetPoint {
    pub frame: usize,
    pub vector: Vec<f64>,
}

/// Averaged DTW local cost per reference frame.
///
/// Each alignment contributes, for every reference frame, the mean local
/// cost of the path cells on that frame; the result averages those
/// contributions over all `others`.
pub fn avg_local_cost_profile(
    reference: &FeatureTrajectory,
    others: &[&FeatureTrajectory],
    metric: CostMetric,
) -> Result<Vec<f64>> {
    if others.is_empty() {
        return Err(Error::Empty("no alignment partners".into()));
    }
    let frames = reference.frames();
    let mut profile = vec![0.0; frames];
    for other in others {
        let alignment = dtw(reference, other, metric)?;
        let mut sum = vec![0.0; frames];
        let mut count = vec![0usize; frames];
        for (&(i, _), c) in alignment.path.iter().zip(&alignment.local_costs) {
            sum[i] += c;
            count[i] += 1;
        }
        for ((p, s), n) in profile.iter_mut().zip(&sum).zip(&count) {
            *p += s / *n as f64;
        }
    }
    let n = others.len() as f64;
    for p in &mut profile {
        *p /= n;
    }
    Ok(profile)
}

/// Index of the largest value; ties resolve to the earliest index.
pub fn argmax_earliest(values: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (k, &v) in values.iter().enumerate() {
        match best {
            Some((_, b)) if v <= b => {}
            _ => best = Some((k, v)),
        }
    }
    best.map(|(k, _)| k)
}

pub fn extract_target(
    reference: &FeatureTrajectory,
    others: &[&FeatureTrajectory],
    metric: CostMetric,
) -> Result<TargetPoint> {
    let profile = avg_local_cost_profile(reference, others, metric)?;
    let frame = argmax_earliest(&profile).expect("trajectories have at least one frame");
    Ok(TargetPoint {
        frame,
        vector: reference.frame(frame).to_vec(),
    })
}
