//! Trajectory interchange format and sample manifests.
//!
//! Trajectories are stored in the AFT1 binary layout:
//!
//! | bytes    | content                                   |
//! |----------|-------------------------------------------|
//! | 0..4     | ASCII magic `AFT1`                        |
//! | 4..8     | `u32` LE frame count                      |
//! | 8..12    | `u32` LE channel count                    |
//! | 12..16   | `f32` LE frame rate in Hz                 |
//! | 16..     | `frames * channels` `f32` LE, frame-major |
//!
//! Channel names are not part of the binary; they travel in the manifest.

mod manifest;

pub use manifest::{load_manifest, load_trajectories, Manifest, Role, SampleRecord};

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::{Array2, ArrayView1};

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"AFT1";
pub const HEADER_LEN: usize = 16;

/// A frames x channels matrix sampled at a fixed frame rate.
///
/// Values are held as `f64` for downstream math; on disk they are `f32`, so
/// writing rounds each element to the nearest `f32`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTrajectory {
    data: Array2<f64>,
    frame_rate_hz: f64,
    channel_names: Option<Vec<String>>,
}

impl FeatureTrajectory {
    pub fn new(data: Array2<f64>, frame_rate_hz: f64) -> Result<Self> {
        let (frames, channels) = data.dim();
        if frames == 0 {
            return Err(Error::ZeroDims("frames"));
        }
        if channels == 0 {
            return Err(Error::ZeroDims("channels"));
        }
        if !(frame_rate_hz.is_finite() && frame_rate_hz > 0.0) {
            return Err(Error::InvalidFrameRate(frame_rate_hz));
        }
        if let Some(((frame, channel), _)) = data.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { frame, channel });
        }
        Ok(Self {
            data,
            frame_rate_hz,
            channel_names: None,
        })
    }

    /// Builds a trajectory from frame-major rows.
    pub fn from_rows(rows: &[Vec<f64>], frame_rate_hz: f64) -> Result<Self> {
        let channels = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != channels) {
            return Err(Error::Shape(format!(
                "ragged rows: {} vs {} channels",
                bad.len(),
                channels
            )));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        let data = Array2::from_shape_vec((rows.len(), channels), flat)
            .map_err(|e| Error::Shape(e.to_string()))?;
        Self::new(data, frame_rate_hz)
    }

    pub fn with_channel_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.channels() {
            return Err(Error::Shape(format!(
                "{} channel names for {} channels",
                names.len(),
                self.channels()
            )));
        }
        self.channel_names = Some(names);
        Ok(self)
    }

    pub fn frames(&self) -> usize {
        self.data.nrows()
    }

    pub fn channels(&self) -> usize {
        self.data.ncols()
    }

    pub fn frame_rate_hz(&self) -> f64 {
        self.frame_rate_hz
    }

    pub fn channel_names(&self) -> Option<&[String]> {
        self.channel_names.as_deref()
    }

    pub fn data(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn frame(&self, index: usize) -> ArrayView1<'_, f64> {
        self.data.row(index)
    }

    /// Replaces the matrix, keeping frame rate and channel names.
    /// The new matrix must have the same channel count.
    pub fn map_data(&self, data: Array2<f64>) -> Result<Self> {
        if data.ncols() != self.channels() {
            return Err(Error::ChannelMismatch {
                left: self.channels(),
                right: data.ncols(),
            });
        }
        let mut out = Self::new(data, self.frame_rate_hz)?;
        out.channel_names = self.channel_names.clone();
        Ok(out)
    }

    pub fn into_data(self) -> Array2<f64> {
        self.data
    }
}

/// Serializes `traj` as AFT1.
pub fn write_trajectory<W: Write>(traj: &FeatureTrajectory, mut sink: W) -> Result<()> {
    // Rounding to f32 can overflow to infinity for huge f64 values.
    for ((frame, channel), v) in traj.data.indexed_iter() {
        if !(*v as f32).is_finite() {
            return Err(Error::NonFinite { frame, channel });
        }
    }
    let frames =
        u32::try_from(traj.frames()).map_err(|_| Error::Shape("frame count exceeds u32".into()))?;
    let channels = u32::try_from(traj.channels())
        .map_err(|_| Error::Shape("channel count exceeds u32".into()))?;

    let mut buf = Vec::with_capacity(HEADER_LEN + 4 * traj.data.len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&frames.to_le_bytes());
    buf.extend_from_slice(&channels.to_le_bytes());
    buf.extend_from_slice(&(traj.frame_rate_hz as f32).to_le_bytes());
    for v in traj.data.iter() {
        buf.extend_from_slice(&(*v as f32).to_le_bytes());
    }
    sink.write_all(&buf)?;
    sink.flush()?;
    Ok(())
}

/// Parses an AFT1 stream. The header is validated before any payload is
/// allocated, and the payload buffer never exceeds the declared size.
pub fn read_trajectory<R: Read>(mut source: R) -> Result<FeatureTrajectory> {
    let mut header = [0u8; HEADER_LEN];
    let got = read_full(&mut source, &mut header)?;
    if got < 4 {
        return Err(Error::Truncated {
            expected: HEADER_LEN as u64,
            found: got as u64,
        });
    }
    let magic: [u8; 4] = header[0..4].try_into().unwrap();
    if &magic != MAGIC {
        return Err(Error::BadMagic { found: magic });
    }
    if got < HEADER_LEN {
        return Err(Error::Truncated {
            expected: HEADER_LEN as u64,
            found: got as u64,
        });
    }
    let frames = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
    let channels = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
    let rate = f32::from_le_bytes(header[12..16].try_into().unwrap());
    if frames == 0 {
        return Err(Error::ZeroDims("frames"));
    }
    if channels == 0 {
        return Err(Error::ZeroDims("channels"));
    }
    if !(rate.is_finite() && rate > 0.0) {
        return Err(Error::InvalidFrameRate(rate as f64));
    }

    let expected = (frames as u64)
        .checked_mul(channels as u64)
        .and_then(|n| n.checked_mul(4))
        .ok_or_else(|| Error::Shape(format!("declared size {frames}x{channels} overflows")))?;
    let mut payload = Vec::new();
    let found = source.by_ref().take(expected).read_to_end(&mut payload)? as u64;
    if found < expected {
        return Err(Error::Truncated { expected, found });
    }

    let mut values = Vec::with_capacity(frames * channels);
    for (k, chunk) in payload.chunks_exact(4).enumerate() {
        let v = f32::from_le_bytes(chunk.try_into().unwrap());
        if !v.is_finite() {
            return Err(Error::NonFinite {
                frame: k / channels,
                channel: k % channels,
            });
        }
        values.push(v as f64);
    }
    let data = Array2::from_shape_vec((frames, channels), values)
        .map_err(|e| Error::Shape(e.to_string()))?;
    FeatureTrajectory::new(data, rate as f64)
}

fn read_full<R: Read>(source: &mut R, buf: &mut [u8]) -> Result<usize> {
    let mut filled = 0;
    while filled < buf.len() {
        match source.read(&mut buf[filled..]) {
            Ok(0) => break,
            Ok(n) => filled += n,
            Err(e) if e.kind() == std::io::ErrorKind::Interrupted => continue,
            Err(e) => return Err(e.into()),
        }
    }
    Ok(filled)
}

pub fn read_trajectory_file(path: impl AsRef<Path>) -> Result<FeatureTrajectory> {
    read_trajectory(BufReader::new(File::open(path)?))
}

pub fn write_trajectory_file(traj: &FeatureTrajectory, path: impl AsRef<Path>) -> Result<()> {
    write_trajectory(traj, BufWriter::new(File::create(path)?))
}
