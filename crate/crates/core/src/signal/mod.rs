//! Trajectory preprocessing: per-speaker z-normalization and zero-phase
//! Butterworth low-pass filtering.

mod butterworth;
mod filtfilt;
mod znorm;

pub use butterworth::{design_butterworth_lowpass, Biquad, FilterSpec, SosCascade};
pub use filtfilt::{filtfilt, filtfilt_slice, pad_len};
pub use znorm::{pooled_stats, znorm_by_speaker, SpeakerStats};

use serde::{Deserialize, Serialize};

/// Low-pass settings without a sample rate; the rate comes from the
/// trajectories being filtered.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lowpass {
    pub order: usize,
    pub cutoff_hz: f64,
}

impl Default for Lowpass {
    fn default() -> Self {
        Self {
            order: 5,
            cutoff_hz: 10.0,
        }
    }
}

impl Lowpass {
    pub fn at_rate(&self, sample_rate_hz: f64) -> crate::Result<FilterSpec> {
        FilterSpec::new(self.order, self.cutoff_hz, sample_rate_hz)
    }
}
