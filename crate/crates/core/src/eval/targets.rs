use std::collections::{BTreeMap, HashMap};
use std::io::BufRead;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::align::{extract_target, CostMetric};
use crate::error::{Error, Result};
use crate::featio::{FeatureTrajectory, Manifest};
use crate::signal::{design_butterworth_lowpass, filtfilt, znorm_by_speaker, Lowpass};

/// One extracted target: the sample's channel vector at its target frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetRow {
    pub id: String,
    pub speaker: String,
    pub label: String,
    pub set_id: String,
    pub frame: usize,
    pub vector: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TargetTable {
    pub rows: Vec<TargetRow>,
}

impl TargetTable {
    pub fn new(rows: Vec<TargetRow>) -> Result<Self> {
        if let Some(first) = rows.first() {
            let dim = first.vector.len();
            if dim == 0 {
                return Err(Error::ZeroDims("target dimensions"));
            }
            if let Some(bad) = rows.iter().find(|r| r.vector.len() != dim) {
                return Err(Error::Shape(format!(
                    "target {:?} has {} dimensions, expected {dim}",
                    bad.id,
                    bad.vector.len()
                )));
            }
            if let Some(bad) = rows
                .iter()
                .find(|r| r.vector.iter().any(|v| !v.is_finite()))
            {
                return Err(Error::Invalid(format!("target {:?} is not finite", bad.id)));
            }
        }
        Ok(Self { rows })
    }

    pub fn dim(&self) -> Option<usize> {
        self.rows.first().map(|r| r.vector.len())
    }

    pub fn by_set(&self) -> BTreeMap<&str, Vec<&TargetRow>> {
        let mut out: BTreeMap<&str, Vec<&TargetRow>> = BTreeMap::new();
        for r in &self.rows {
            out.entry(r.set_id.as_str()).or_default().push(r);
        }
        out
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            out.push_str(&serde_json::to_string(r).expect("row serializes"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl<R: BufRead>(source: R) -> Result<Self> {
        let mut rows = Vec::new();
        for (k, line) in source.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            rows.push(serde_json::from_str(&line).map_err(|e| Error::Parse {
                line: k + 1,
                reason: e.to_string(),
            })?);
        }
        Self::new(rows)
    }
}

/// Preprocessing applied before target extraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Preprocess {
    pub znorm: bool,
    pub lowpass: Option<Lowpass>,
}

impl Default for Preprocess {
    fn default() -> Self {
        Self {
            znorm: true,
            lowpass: Some(Lowpass::default()),
        }
    }
}

/// Z-normalizes by speaker (over the whole manifest), then low-pass filters.
pub fn preprocess(
    manifest: &Manifest,
    trajectories: &HashMap<String, FeatureTrajectory>,
    config: &Preprocess,
) -> Result<HashMap<String, FeatureTrajectory>> {
    let normed;
    let source = if config.znorm {
        normed = znorm_by_speaker(manifest, trajectories)?.0;
        &normed
    } else {
        trajectories
    };
    let Some(lowpass) = config.lowpass else {
        return manifest
            .records
            .iter()
            .map(|r| {
                let t = source
                    .get(&r.id)
                    .ok_or_else(|| Error::Empty("trajectory not loaded".into()).in_sample(&r.id))?;
                Ok((r.id.clone(), t.clone()))
            })
            .collect();
    };
    manifest
        .records
        .par_iter()
        .map(|r| {
            let t = source
                .get(&r.id)
                .ok_or_else(|| Error::Empty("trajectory not loaded".into()).in_sample(&r.id))?;
            let sos = design_butterworth_lowpass(&lowpass.at_rate(t.frame_rate_hz())?)?;
            let filtered = filtfilt(&sos, t).map_err(|e| e.in_sample(&r.id))?;
            Ok((r.id.clone(), filtered))
        })
        .collect()
}

fn check_sets(
    manifest: &Manifest,
    trajectories: &HashMap<String, FeatureTrajectory>,
) -> Result<()> {
    for (set_id, records) in manifest.by_set() {
        let mut shape: Option<(f64, usize)> = None;
        for r in records {
            let t = trajectories
                .get(&r.id)
                .ok_or_else(|| Error::Empty("trajectory not loaded".into()).in_sample(&r.id))?;
            let here = (t.frame_rate_hz(), t.channels());
            match shape {
                None => shape = Some(here),
                Some(s) if s != here => return Err(Error::Invalid(format!(
                    "set {set_id:?}: sample {:?} has rate {} Hz / {} channels, expected {} Hz / {}",
                    r.id, here.0, here.1, s.0, s.1
                ))),
                _ => {}
            }
        }
    }
    Ok(())
}

/// Preprocesses all trajectories and extracts one target per sample.
///
/// Each sample is aligned against every other sample of the same speaker in
/// the same set, whatever their labels. Rows follow manifest order.
pub fn build_targets(
    manifest: &Manifest,
    trajectories: &HashMap<String, FeatureTrajectory>,
    metric: CostMetric,
    config: &Preprocess,
) -> Result<TargetTable> {
    check_sets(manifest, trajectories)?;
    let processed = preprocess(manifest, trajectories, config)?;

    let mut partners: HashMap<(&str, &str), Vec<&str>> = HashMap::new();
    for r in &manifest.records {
        partners
            .entry((r.set_id.as_str(), r.speaker.as_str()))
            .or_default()
            .push(r.id.as_str());
    }

    let rows = manifest
        .records
        .par_iter()
        .map(|r| {
            let group = &partners[&(r.set_id.as_str(), r.speaker.as_str())];
            let others: Vec<&FeatureTrajectory> = group
                .iter()
                .filter(|id| **id != r.id)
                .map(|id| &processed[*id])
                .collect();
            if others.is_empty() {
                return Err(Error::Invalid(format!(
                    "speaker {:?} has a single sample in set {:?}; nothing to align against",
                    r.speaker, r.set_id
                ))
                .in_sample(&r.id));
            }
            let target = extract_target(&processed[&r.id], &others, metric)
                .map_err(|e| e.in_sample(&r.id))?;
            Ok(TargetRow {
                id: r.id.clone(),
                speaker: r.speaker.clone(),
                label: r.label.clone(),
                set_id: r.set_id.clone(),
                frame: target.frame,
                vector: target.vector,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    TargetTable::new(rows)
}
