//! Seeded synthetic corpora with known ground truth.
//!
//! [`articulatory_suite`] mimics V-C-V articulatory recordings: a smooth
//! per-speaker vowel context with independent smooth noise, into which a
//! class-specific target posture is blended around a jittered center frame.
//! Each speaker then applies its own per-channel gain and offset, which
//! per-speaker z-normalization is expected to undo.
//!
//! [`feature_suite`] mimics high-dimensional self-supervised speech features
//! for one consonant minimal-pair set, with no articulatory structure: every
//! label gets an unrelated random prototype.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::featio::{write_trajectory_file, FeatureTrajectory, Manifest, Role, SampleRecord};
use crate::signal::{design_butterworth_lowpass, filtfilt_slice, FilterSpec};

pub const CONSONANT_LABELS: [&str; 8] = ["b", "d", "g", "f", "s", "z", "l", "w"];

#[derive(Debug, Clone)]
pub struct SuiteSpec {
    pub speakers: usize,
    pub classes: usize,
    pub repetitions: usize,
    pub frames: usize,
    pub channels: usize,
    pub frame_rate_hz: f64,
    /// Per-channel standard deviation of a sample's target around its class mean.
    pub within_std: f64,
    /// Minimum distance between class means, in units of `within_std`.
    pub min_separation: f64,
    /// Standard deviation of the smooth background noise.
    pub noise_std: f64,
    /// Maximum shift of the target center from the middle frame.
    pub max_jitter: usize,
}

impl Default for SuiteSpec {
    fn default() -> Self {
        Self {
            speakers: 6,
            classes: 5,
            repetitions: 4,
            frames: 100,
            channels: 8,
            frame_rate_hz: 100.0,
            within_std: 0.15,
            min_separation: 5.0,
            noise_std: 0.3,
            max_jitter: 4,
        }
    }
}

/// A generated corpus, ready for the target pipeline or for writing to disk.
#[derive(Debug, Clone)]
pub struct Suite {
    pub manifest: Manifest,
    pub trajectories: HashMap<String, FeatureTrajectory>,
}

impl Suite {
    /// Writes `<id>.aft` files and `manifest.jsonl` into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        for r in &self.manifest.records {
            write_trajectory_file(&self.trajectories[&r.id], dir.join(&r.path))?;
        }
        fs::write(dir.join("manifest.jsonl"), self.manifest.to_jsonl())?;
        Ok(())
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Low-pass filtered white noise, rescaled to unit population std.
///
/// The noise is generated with a margin on both sides and cropped, since
/// the ends of a filtered white-noise record follow single raw samples.
fn smooth_noise(rng: &mut ChaCha8Rng, frames: usize, frame_rate_hz: f64) -> Vec<f64> {
    const MARGIN: usize = 50;
    let spec =
        FilterSpec::new(2, frame_rate_hz / 25.0, frame_rate_hz).expect("valid smoothing filter");
    let sos = design_butterworth_lowpass(&spec).expect("valid smoothing filter");
    let white: Vec<f64> = (0..frames + 2 * MARGIN).map(|_| gaussian(rng)).collect();
    let padded = filtfilt_slice(&sos, &white).expect("enough frames for smoothing");
    let mut smooth = padded[MARGIN..MARGIN + frames].to_vec();
    let mean = smooth.iter().sum::<f64>() / frames as f64;
    let std = (smooth.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / frames as f64).sqrt();
    for v in &mut smooth {
        *v = (*v - mean) / std;
    }
    smooth
}

fn class_means(rng: &mut ChaCha8Rng, spec: &SuiteSpec) -> Vec<Vec<f64>> {
    let min_dist = spec.min_separation * spec.within_std * (spec.channels as f64).sqrt();
    loop {
        let means: Vec<Vec<f64>> = (0..spec.classes)
            .map(|_| (0..spec.channels).map(|_| 1.5 * gaussian(rng)).collect())
            .collect();
        let separated = means.iter().enumerate().all(|(i, a)| {
            means[i + 1..].iter().all(|b| {
                a.iter()
                    .zip(b)
                    .map(|(x, y)| (x - y).powi(2))
                    .sum::<f64>()
                    .sqrt()
                    >= min_dist
            })
        });
        if separated {
            return means;
        }
    }
}

/// Class `k` is labelled with the k-th consonant name (or `c<k>` past them).
pub fn class_label(k: usize) -> String {
    CONSONANT_LABELS
        .get(k)
        .map_or_else(|| format!("c{k}"), |s| s.to_string())
}

pub fn articulatory_suite(spec: &SuiteSpec, seed: u64) -> Suite {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let means = class_means(&mut rng, spec);
    let (frames, channels) = (spec.frames, spec.channels);
    let width = (frames as f64 / 25.0).max(1.0);

    let mut records = Vec::new();
    let mut trajectories = HashMap::new();
    for s in 0..spec.speakers {
        let speaker = format!("spk{:02}", s + 1);
        let gain: Vec<f64> = (0..channels).map(|_| rng.gen_range(0.6..1.6)).collect();
        let offset: Vec<f64> = (0..channels).map(|_| 2.0 * gaussian(&mut rng)).collect();
        let context: Vec<Vec<f64>> = (0..channels)
            .map(|_| smooth_noise(&mut rng, frames, spec.frame_rate_hz))
            .collect();

        for (k, mean) in means.iter().enumerate() {
            let label = class_label(k);
            for rep in 0..spec.repetitions {
                let id = format!("{speaker}_{label}_{}", rep + 1);
                let jitter = rng.gen_range(-(spec.max_jitter as i64)..=spec.max_jitter as i64);
                let center = (frames / 2) as f64 + jitter as f64;
                let target: Vec<f64> = mean
                    .iter()
                    .map(|m| m + spec.within_std * gaussian(&mut rng))
                    .collect();
                let noise: Vec<Vec<f64>> = (0..channels)
                    .map(|_| smooth_noise(&mut rng, frames, spec.frame_rate_hz))
                    .collect();
                let data = Array2::from_shape_fn((frames, channels), |(t, c)| {
                    let w = (-0.5 * ((t as f64 - center) / width).powi(2)).exp();
                    let background = context[c][t] + spec.noise_std * noise[c][t];
                    let x = (1.0 - w) * background + w * target[c];
                    gain[c] * x + offset[c]
                });
                trajectories.insert(
                    id.clone(),
                    FeatureTrajectory::new(data, spec.frame_rate_hz)
                        .expect("finite synthetic data"),
                );
                records.push(SampleRecord {
                    path: format!("{id}.aft"),
                    id,
                    speaker: speaker.clone(),
                    word: format!("a{label}a"),
                    label: label.clone(),
                    set_id: "synth".into(),
                    role: Role::Articulatory,
                    channel_names: None,
                });
            }
        }
    }
    Suite {
        manifest: Manifest::new(records).expect("unique synthetic ids"),
        trajectories,
    }
}

#[derive(Debug, Clone)]
pub struct FeatureSuiteSpec {
    pub speakers: usize,
    pub labels: Vec<String>,
    pub frames: usize,
    pub dim: usize,
    pub frame_rate_hz: f64,
}

impl Default for FeatureSuiteSpec {
    fn default() -> Self {
        Self {
            speakers: 6,
            labels: ["b", "p", "f", "t", "k", "s"].map(String::from).to_vec(),
            frames: 60,
            dim: 1024,
            frame_rate_hz: 50.0,
        }
    }
}

/// One sample per (speaker, label): a shared vowel frame with the label's
/// random prototype blended in at the center, plus a speaker offset and
/// per-frame noise.
pub fn feature_suite(spec: &FeatureSuiteSpec, seed: u64) -> Suite {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = spec.dim;
    let vowel: Vec<f64> = (0..dim).map(|_| gaussian(&mut rng)).collect();
    let prototypes: Vec<Vec<f64>> = spec
        .labels
        .iter()
        .map(|_| (0..dim).map(|_| gaussian(&mut rng)).collect())
        .collect();
    let width = spec.frames as f64 / 12.0;

    let mut records = Vec::new();
    let mut trajectories = HashMap::new();
    for s in 0..spec.speakers {
        let speaker = format!("voice{:02}", s + 1);
        let offset: Vec<f64> = (0..dim).map(|_| 0.5 * gaussian(&mut rng)).collect();
        for (label, proto) in spec.labels.iter().zip(&prototypes) {
            let id = format!("{speaker}_{label}");
            let center = (spec.frames / 2) as f64 + rng.gen_range(-3.0..=3.0f64).round();
            let mut data = Array2::zeros((spec.frames, dim));
            for t in 0..spec.frames {
                let w = (-0.5 * ((t as f64 - center) / width).powi(2)).exp();
                for d in 0..dim {
                    data[[t, d]] =
                        (1.0 - w) * vowel[d] + w * proto[d] + offset[d] + 0.3 * gaussian(&mut rng);
                }
            }
            trajectories.insert(
                id.clone(),
                FeatureTrajectory::new(data, spec.frame_rate_hz).expect("finite synthetic data"),
            );
            records.push(SampleRecord {
                path: format!("{id}.aft"),
                id,
                speaker: speaker.clone(),
                word: format!("{label}ail"),
                label: label.clone(),
                set_id: "voicing".into(),
                role: Role::Feature,
                channel_names: None,
            });
        }
    }
    Suite {
        manifest: Manifest::new(records).expect("unique synthetic ids"),
        trajectories,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_shape() {
        let suite = articulatory_suite(&SuiteSpec::default(), 1);
        assert_eq!(suite.manifest.len(), 6 * 5 * 4);
        let t = &suite.trajectories[&suite.manifest.records[0].id];
        assert_eq!((t.frames(), t.channels()), (100, 8));
    }

    #[test]
    fn same_seed_same_suite() {
        let a = articulatory_suite(&SuiteSpec::default(), 9);
        let b = articulatory_suite(&SuiteSpec::default(), 9);
        assert_eq!(a.manifest, b.manifest);
        for r in &a.manifest.records {
            assert_eq!(a.trajectories[&r.id], b.trajectories[&r.id]);
        }
        let c = articulatory_suite(&SuiteSpec::default(), 10);
        let id = &a.manifest.records[0].id;
        assert_ne!(a.trajectories[id], c.trajectories[id]);
    }

    #[test]
    fn feature_suite_shape() {
        let suite = feature_suite(
            &FeatureSuiteSpec {
                dim: 32,
                ..Default::default()
            },
            3,
        );
        assert_eq!(suite.manifest.len(), 36);
        assert!(suite
            .manifest
            .records
            .iter()
            .all(|r| r.role == Role::Feature));
    }
}
