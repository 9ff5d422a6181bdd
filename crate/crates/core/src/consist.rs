//! DTW-weighted consistency loss for training feature-to-articulation models.
//!
//! A model output `ŷ` on an utterance is pulled toward a frozen copy's output
//! `y` on the same utterance (self-training term) and toward the model's own
//! output `ŷ*` on a paired utterance, frame-matched through a warping `φ`
//! and weighted by the cosine similarity `c` of the aligned input features
//! (consistency term):
//!
//! ```text
//! L_st    = (1/N) Σᵢ ‖ŷᵢ − yᵢ‖²
//! L_c     = (1/N) Σᵢ cᵢ ‖ŷᵢ − ŷ*_φ(i)‖²
//! L_total = α L_st + (1 − α) L_c
//! ```

use ndarray::{Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::align::{dtw, CostMetric};
use crate::error::{Error, Result};
use crate::featio::FeatureTrajectory;

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyBatch {
    /// Model output on the utterance, `N × D`.
    pub y_hat: Array2<f64>,
    /// Frozen-model output on the same utterance, `N × D`.
    pub y_frozen: Array2<f64>,
    /// Model output on the paired utterance, `M × D`.
    pub y_hat_star: Array2<f64>,
    /// Non-decreasing map from `[0, N)` into `[0, M)`.
    pub phi: Vec<usize>,
    /// Weight per frame of `y_hat`.
    pub c: Vec<f64>,
    pub alpha: f64,
}

/// The JSON part of a stored batch; the three matrices travel as AFT1 files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSidecar {
    pub phi: Vec<usize>,
    pub c: Vec<f64>,
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossBreakdown {
    pub l_st: f64,
    pub l_c: f64,
    pub total: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossGradients {
    pub y_hat: Array2<f64>,
    pub y_hat_star: Array2<f64>,
}

impl ConsistencyBatch {
    pub fn new(
        y_hat: Array2<f64>,
        y_frozen: Array2<f64>,
        y_hat_star: Array2<f64>,
        phi: Vec<usize>,
        c: Vec<f64>,
        alpha: f64,
    ) -> Result<Self> {
        let batch = Self {
            y_hat,
            y_frozen,
            y_hat_star,
            phi,
            c,
            alpha,
        };
        batch.validate()?;
        Ok(batch)
    }

    pub fn from_sidecar(
        y_hat: Array2<f64>,
        y_frozen: Array2<f64>,
        y_hat_star: Array2<f64>,
        sidecar: BatchSidecar,
    ) -> Result<Self> {
        Self::new(
            y_hat,
            y_frozen,
            y_hat_star,
            sidecar.phi,
            sidecar.c,
            sidecar.alpha,
        )
    }

    pub fn sidecar(&self) -> BatchSidecar {
        BatchSidecar {
            phi: self.phi.clone(),
            c: self.c.clone(),
            alpha: self.alpha,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (n, d) = self.y_hat.dim();
        let (m, d_star) = self.y_hat_star.dim();
        if n == 0 || m == 0 || d == 0 {
            return Err(Error::ZeroDims("batch matrices"));
        }
        if self.y_frozen.dim() != (n, d) {
            return Err(Error::Shape(format!(
                "y_frozen is {}×{}, y_hat is {n}×{d}",
                self.y_frozen.nrows(),
                self.y_frozen.ncols()
            )));
        }
        if d_star != d {
            return Err(Error::Shape(format!(
                "y_hat_star has {d_star} dimensions, y_hat has {d}"
            )));
        }
        if self.phi.len() != n || self.c.len() != n {
            return Err(Error::Shape(format!(
                "phi has {} entries and c has {}, expected {n}",
                self.phi.len(),
                self.c.len()
            )));
        }
        if let Some(i) = self.phi.iter().position(|&j| j >= m) {
            return Err(Error::Invalid(format!(
                "phi({i}) = {} is out of range for {m} frames",
                self.phi[i]
            )));
        }
        if let Some(i) = self.phi.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::Invalid(format!("phi decreases after index {i}")));
        }
        if let Some(i) = self.c.iter().position(|v| !v.is_finite()) {
            return Err(Error::Invalid(format!("c[{i}] is not finite")));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::Invalid(format!(
                "alpha must lie in [0, 1], got {}",
                self.alpha
            )));
        }
        let finite = |a: &Array2<f64>| a.iter().all(|v| v.is_finite());
        if !(finite(&self.y_hat) && finite(&self.y_frozen) && finite(&self.y_hat_star)) {
            return Err(Error::Invalid(
                "batch matrices contain non-finite values".into(),
            ));
        }
        Ok(())
    }

    /// Replaces negative weights with 0.
    pub fn clamp_weights(mut self) -> Self {
        for v in &mut self.c {
            *v = v.max(0.0);
        }
        self
    }

    fn n(&self) -> f64 {
        self.y_hat.nrows() as f64
    }
}

fn sq_dist(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn self_training_loss(batch: &ConsistencyBatch) -> Result<f64> {
    batch.validate()?;
    let sum: f64 = batch
        .y_hat
        .rows()
        .into_iter()
        .zip(batch.y_frozen.rows())
        .map(|(a, b)| sq_dist(a, b))
        .sum();
    Ok(sum / batch.n())
}

pub fn consistency_loss(batch: &ConsistencyBatch) -> Result<f64> {
    batch.validate()?;
    let sum: f64 = batch
        .y_hat
        .rows()
        .into_iter()
        .enumerate()
        .map(|(i, row)| batch.c[i] * sq_dist(row, batch.y_hat_star.row(batch.phi[i])))
        .sum();
    Ok(sum / batch.n())
}

pub fn total_loss(batch: &ConsistencyBatch) -> Result<f64> {
    Ok(loss_breakdown(batch)?.total)
}

pub fn loss_breakdown(batch: &ConsistencyBatch) -> Result<LossBreakdown> {
    let l_st = self_training_loss(batch)?;
    let l_c = consistency_loss(batch)?;
    Ok(LossBreakdown {
        l_st,
        l_c,
        total: batch.alpha * l_st + (1.0 - batch.alpha) * l_c,
        alpha: batch.alpha,
    })
}

/// Gradients of the total loss with respect to `y_hat` and `y_hat_star`.
/// The frozen output gets none.
pub fn total_loss_grad(batch: &ConsistencyBatch) -> Result<LossGradients> {
    batch.validate()?;
    let n = batch.n();
    let st = 2.0 * batch.alpha / n;
    let cons = 2.0 * (1.0 - batch.alpha) / n;
    let mut g_hat = Array2::zeros(batch.y_hat.dim());
    let mut g_star = Array2::zeros(batch.y_hat_star.dim());
    for i in 0..batch.y_hat.nrows() {
        let j = batch.phi[i];
        let w = cons * batch.c[i];
        for d in 0..batch.y_hat.ncols() {
            let own = batch.y_hat[[i, d]];
            let pull = w * (own - batch.y_hat_star[[j, d]]);
            g_hat[[i, d]] = st * (own - batch.y_frozen[[i, d]]) + pull;
            g_star[[j, d]] -= pull;
        }
    }
    Ok(LossGradients {
        y_hat: g_hat,
        y_hat_star: g_star,
    })
}

/// Aligns the input features of both utterances with cosine-distance DTW to
/// obtain `φ` and `c`, then assembles the batch. Predictions must run at the
/// feature frame rate: one row per feature frame.
pub fn build_batch_from_features(
    w: &FeatureTrajectory,
    w_star: &FeatureTrajectory,
    y_hat: Array2<f64>,
    y_frozen: Array2<f64>,
    y_hat_star: Array2<f64>,
    alpha: f64,
) -> Result<ConsistencyBatch> {
    if w.frames() != y_hat.nrows() {
        return Err(Error::Shape(format!(
            "features have {} frames but predictions have {}",
            w.frames(),
            y_hat.nrows()
        )));
    }
    if w_star.frames() != y_hat_star.nrows() {
        return Err(Error::Shape(format!(
            "paired features have {} frames but paired predictions have {}",
            w_star.frames(),
            y_hat_star.nrows()
        )));
    }
    let alignment = dtw(w, w_star, CostMetric::CosineDistance)?;
    let c = alignment.weights.expect("cosine alignment carries weights");
    ConsistencyBatch::new(y_hat, y_frozen, y_hat_star, alignment.phi, c, alpha)
}
