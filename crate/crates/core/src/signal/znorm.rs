use std::collections::{BTreeMap, HashMap};

use ndarray::{Array1, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::featio::{FeatureTrajectory, Manifest};

/// Per-channel statistics pooled over every frame of one speaker.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeakerStats {
    pub speaker: String,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

/// Population mean and standard deviation over all rows of `trajs`.
pub fn pooled_stats<'a>(
    speaker: &str,
    trajs: impl IntoIterator<Item = &'a FeatureTrajectory> + Clone,
) -> Result<SpeakerStats> {
    let mut channels = None;
    let mut count = 0usize;
    let mut sum: Option<Array1<f64>> = None;
    for t in trajs.clone() {
        match channels {
            None => channels = Some(t.channels()),
            Some(c) if c != t.channels() => {
                return Err(Error::ChannelMismatch {
                    left: c,
                    right: t.channels(),
                })
            }
            _ => {}
        }
        let s = t.data().sum_axis(Axis(0));
        sum = Some(match sum {
            None => s,
            Some(acc) => acc + s,
        });
        count += t.frames();
    }
    let Some(sum) = sum else {
        return Err(Error::Empty(format!("speaker {speaker:?} has no samples")));
    };
    let n = count as f64;
    let mean = sum / n;

    // Second pass on centered values keeps the variance accurate.
    let mut sq = Array1::<f64>::zeros(mean.len());
    for t in trajs {
        for row in t.data().rows() {
            for (acc, (v, m)) in sq.iter_mut().zip(row.iter().zip(mean.iter())) {
                *acc += (v - m) * (v - m);
            }
        }
    }
    let std: Vec<f64> = sq.iter().map(|s| (s / n).sqrt()).collect();
    if let Some(channel) = std.iter().position(|s| *s <= 0.0) {
        return Err(Error::ZeroVariance {
            speaker: speaker.to_owned(),
            channel,
        });
    }
    Ok(SpeakerStats {
        speaker: speaker.to_owned(),
        mean: mean.to_vec(),
        std,
    })
}

impl SpeakerStats {
    pub fn apply(&self, traj: &FeatureTrajectory) -> Result<FeatureTrajectory> {
        if traj.channels() != self.mean.len() {
            return Err(Error::ChannelMismatch {
                left: self.mean.len(),
                right: traj.channels(),
            });
        }
        let mut data = traj.data().clone();
        for mut row in data.rows_mut() {
            for ((v, m), s) in row.iter_mut().zip(&self.mean).zip(&self.std) {
                *v = (*v - m) / s;
            }
        }
        traj.map_data(data)
    }
}

/// Standardizes every trajectory with its speaker's pooled statistics.
/// Returned stats are ordered by speaker name.
pub fn znorm_by_speaker(
    manifest: &Manifest,
    trajectories: &HashMap<String, FeatureTrajectory>,
) -> Result<(HashMap<String, FeatureTrajectory>, Vec<SpeakerStats>)> {
    let mut by_speaker: BTreeMap<&str, Vec<&FeatureTrajectory>> = BTreeMap::new();
    for r in &manifest.records {
        let t = trajectories
            .get(&r.id)
            .ok_or_else(|| Error::Empty("trajectory not loaded".into()).in_sample(&r.id))?;
        by_speaker.entry(r.speaker.as_str()).or_default().push(t);
    }

    let mut stats = BTreeMap::new();
    for (speaker, trajs) in &by_speaker {
        stats.insert(*speaker, pooled_stats(speaker, trajs.iter().copied())?);
    }

    let mut out = HashMap::with_capacity(manifest.len());
    for r in &manifest.records {
        let normed = stats[r.speaker.as_str()]
            .apply(&trajectories[&r.id])
            .map_err(|e| e.in_sample(&r.id))?;
        out.insert(r.id.clone(), normed);
    }
    Ok((out, stats.into_values().collect()))
}
