use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::featio::FeatureTrajectory;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMetrics {
    /// Mean squared error over every frame and channel of every pair.
    pub mse: f64,
    /// Pearson correlation per channel over all frames; `None` where either
    /// side is constant.
    pub correlation: Vec<Option<f64>>,
    /// Mean over the defined channels.
    pub mean_correlation: Option<f64>,
    pub pairs: usize,
    pub frames: usize,
}

/// Compares predictions with references paired by id. Both maps must hold
/// the same ids.
pub fn trajectory_metrics(
    predicted: &HashMap<String, FeatureTrajectory>,
    reference: &HashMap<String, FeatureTrajectory>,
) -> Result<TrajectoryMetrics> {
    let mut ids: Vec<&String> = reference.keys().collect();
    ids.sort();
    if let Some(extra) = predicted.keys().find(|id| !reference.contains_key(*id)) {
        return Err(Error::Invalid(format!(
            "prediction {extra:?} has no reference"
        )));
    }
    let Some(first) = ids.first() else {
        return Err(Error::Empty("no trajectory pairs".into()));
    };
    let channels = reference[*first].channels();

    let mut pairs = Vec::with_capacity(ids.len());
    for id in &ids {
        let r = &reference[*id];
        let p = predicted
            .get(*id)
            .ok_or_else(|| Error::Invalid(format!("reference {id:?} has no prediction")))?;
        if p.frames() != r.frames() || p.channels() != r.channels() || r.channels() != channels {
            return Err(Error::Shape(format!(
                "sample {id:?}: prediction is {}×{}, reference is {}×{}",
                p.frames(),
                p.channels(),
                r.frames(),
                r.channels()
            )));
        }
        pairs.push((p, r));
    }

    let frames: usize = pairs.iter().map(|(_, r)| r.frames()).sum();
    let n = frames as f64;
    let mut sq = 0.0;
    let mut sum_p = vec![0.0; channels];
    let mut sum_r = vec![0.0; channels];
    for (p, r) in &pairs {
        for (pv, rv) in p.data().rows().into_iter().zip(r.data().rows()) {
            for c in 0..channels {
                sq += (pv[c] - rv[c]).powi(2);
                sum_p[c] += pv[c];
                sum_r[c] += rv[c];
            }
        }
    }
    let mean_p: Vec<f64> = sum_p.iter().map(|s| s / n).collect();
    let mean_r: Vec<f64> = sum_r.iter().map(|s| s / n).collect();
    let (mut spp, mut srr, mut spr) = (
        vec![0.0; channels],
        vec![0.0; channels],
        vec![0.0; channels],
    );
    for (p, r) in &pairs {
        for (pv, rv) in p.data().rows().into_iter().zip(r.data().rows()) {
            for c in 0..channels {
                let (dp, dr) = (pv[c] - mean_p[c], rv[c] - mean_r[c]);
                spp[c] += dp * dp;
                srr[c] += dr * dr;
                spr[c] += dp * dr;
            }
        }
    }
    let correlation: Vec<Option<f64>> = (0..channels)
        .map(|c| {
            (spp[c] > 0.0 && srr[c] > 0.0)
                .then(|| (spr[c] / (spp[c] * srr[c]).sqrt()).clamp(-1.0, 1.0))
        })
        .collect();
    let defined: Vec<f64> = correlation.iter().flatten().copied().collect();
    let mean_correlation =
        (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64);

    Ok(TrajectoryMetrics {
        mse: sq / (n * channels as f64),
        correlation,
        mean_correlation,
        pairs: pairs.len(),
        frames,
    })
}
