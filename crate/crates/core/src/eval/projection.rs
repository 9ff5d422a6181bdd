use std::collections::HashMap;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::featio::FeatureTrajectory;

/// A fixed linear map applied to every frame, used as a chance-level
/// feature baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomProjection {
    /// `in_dim × out_dim`; frames are row vectors multiplied on the left.
    matrix: Array2<f64>,
}

impl RandomProjection {
    /// Gaussian entries with variance `1 / in_dim`.
    pub fn new(in_dim: usize, out_dim: usize, seed: u64) -> Result<Self> {
        if in_dim == 0 || out_dim == 0 {
            return Err(Error::ZeroDims("projection dimensions"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scale = 1.0 / (in_dim as f64).sqrt();
        let matrix = Array2::from_shape_simple_fn((in_dim, out_dim), || {
            scale * rng.sample::<f64, _>(StandardNormal)
        });
        Ok(Self { matrix })
    }

    pub fn from_matrix(matrix: Array2<f64>) -> Result<Self> {
        if matrix.is_empty() {
            return Err(Error::ZeroDims("projection dimensions"));
        }
        Ok(Self { matrix })
    }

    pub fn in_dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn out_dim(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    pub fn apply(&self, traj: &FeatureTrajectory) -> Result<FeatureTrajectory> {
        if traj.channels() != self.in_dim() {
            return Err(Error::ChannelMismatch {
                left: traj.channels(),
                right: self.in_dim(),
            });
        }
        FeatureTrajectory::new(traj.data().dot(&self.matrix), traj.frame_rate_hz())
    }

    pub fn apply_all(
        &self,
        trajectories: &HashMap<String, FeatureTrajectory>,
    ) -> Result<HashMap<String, FeatureTrajectory>> {
        trajectories
            .par_iter()
            .map(|(id, t)| Ok((id.clone(), self.apply(t).map_err(|e| e.in_sample(id))?)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn traj(frames: usize, channels: usize, seed: u64) -> FeatureTrajectory {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        FeatureTrajectory::new(
            Array2::from_shape_simple_fn((frames, channels), || rng.sample(StandardNormal)),
            50.0,
        )
        .unwrap()
    }

    #[test]
    fn identity_matrix_is_identity() {
        let t = traj(7, 5, 1);
        let p = RandomProjection::from_matrix(Array2::eye(5)).unwrap();
        assert_eq!(p.apply(&t).unwrap(), t);
    }

    #[test]
    fn shape_and_seed_sensitivity() {
        let a = RandomProjection::new(64, 16, 1).unwrap();
        assert_eq!((a.in_dim(), a.out_dim()), (64, 16));
        assert_eq!(a, RandomProjection::new(64, 16, 1).unwrap());
        assert_ne!(a, RandomProjection::new(64, 16, 2).unwrap());
        let t = traj(4, 64, 3);
        let out = a.apply(&t).unwrap();
        assert_eq!((out.frames(), out.channels()), (4, 16));
        assert!(a.apply(&traj(4, 63, 3)).is_err());
        assert!(RandomProjection::new(64, 0, 1).is_err());
    }

    #[test]
    fn entry_variance_is_inverse_input_dim() {
        let p = RandomProjection::new(1024, 64, 9).unwrap();
        let n = p.matrix().len() as f64;
        let var = p.matrix().iter().map(|v| v * v).sum::<f64>() / n;
        assert!(
            (var * 1024.0 - 1.0).abs() < 0.02,
            "variance × in_dim = {}",
            var * 1024.0
        );
    }
}
