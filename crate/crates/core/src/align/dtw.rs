use ndarray::ArrayView1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::featio::FeatureTrajectory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostMetric {
    Euclidean,
    /// `1 - cosine_similarity`; frames must have nonzero norm.
    #[serde(alias = "cosine")]
    CosineDistance,
}

impl CostMetric {
    pub fn cost(&self, a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
        match self {
            CostMetric::Euclidean => a
                .iter()
                .zip(b.iter())
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            CostMetric::CosineDistance => 1.0 - cosine_similarity(a, b),
        }
    }
}

pub fn cosine_similarity(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    let dot = a.dot(&b);
    let na = a.dot(&a).sqrt();
    let nb = b.dot(&b).sqrt();
    dot / (na * nb)
}

/// An optimal DTW alignment between a reference and a query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignmentResult {
    /// `(reference index, query index)` cells from `(0, 0)` to the last cell.
    pub path: Vec<(usize, usize)>,
    /// Local cost of each path cell.
    pub local_costs: Vec<f64>,
    pub total_cost: f64,
    /// For each reference frame, the last query frame aligned to it.
    pub phi: Vec<usize>,
    /// Cosine similarity of frames `(i, phi[i])`; present for the cosine metric.
    pub weights: Option<Vec<f64>>,
}

impl AlignmentResult {
    /// Mean cosine similarity along the path (cosine metric only).
    pub fn mean_similarity(&self) -> Option<f64> {
        self.weights.as_ref()?;
        let n = self.local_costs.len() as f64;
        Some(self.local_costs.iter().map(|c| 1.0 - c).sum::<f64>() / n)
    }
}

fn check_inputs(
    reference: &FeatureTrajectory,
    query: &FeatureTrajectory,
    metric: CostMetric,
) -> Result<()> {
    if reference.channels() != query.channels() {
        return Err(Error::ChannelMismatch {
            left: reference.channels(),
            right: query.channels(),
        });
    }
    if metric == CostMetric::CosineDistance {
        for t in [reference, query] {
            if let Some(frame) = t
                .data()
                .rows()
                .into_iter()
                .position(|r| r.iter().all(|v| *v == 0.0))
            {
                return Err(Error::ZeroNorm { frame });
            }
        }
    }
    Ok(())
}

/// Unconstrained DTW with steps (1,0), (0,1), (1,1) and unit weights.
///
/// Backtracking prefers the diagonal, then a reference step, then a query
/// step when predecessors tie, so paths are deterministic.
pub fn dtw(
    reference: &FeatureTrajectory,
    query: &FeatureTrajectory,
    metric: CostMetric,
) -> Result<AlignmentResult> {
    check_inputs(reference, query, metric)?;
    let (f, g) = (reference.frames(), query.frames());

    let mut local = vec![0.0; f * g];
    for i in 0..f {
        let r = reference.frame(i);
        for j in 0..g {
            local[i * g + j] = metric.cost(r, query.frame(j));
        }
    }

    let mut acc = vec![f64::INFINITY; f * g];
    for i in 0..f {
        for j in 0..g {
            let best = if i == 0 && j == 0 {
                0.0
            } else {
                let diag = if i > 0 && j > 0 {
                    acc[(i - 1) * g + j - 1]
                } else {
                    f64::INFINITY
                };
                let up = if i > 0 {
                    acc[(i - 1) * g + j]
                } else {
                    f64::INFINITY
                };
                let left = if j > 0 {
                    acc[i * g + j - 1]
                } else {
                    f64::INFINITY
                };
                diag.min(up).min(left)
            };
            acc[i * g + j] = if i == 0 && j == 0 {
                local[0]
            } else {
                best + local[i * g + j]
            };
        }
    }

    let mut path = Vec::with_capacity(f + g);
    let (mut i, mut j) = (f - 1, g - 1);
    path.push((i, j));
    while i > 0 || j > 0 {
        (i, j) = if i == 0 {
            (0, j - 1)
        } else if j == 0 {
            (i - 1, 0)
        } else {
            let diag = acc[(i - 1) * g + j - 1];
            let up = acc[(i - 1) * g + j];
            let left = acc[i * g + j - 1];
            if diag <= up && diag <= left {
                (i - 1, j - 1)
            } else if up <= left {
                (i - 1, j)
            } else {
                (i, j - 1)
            }
        };
        path.push((i, j));
    }
    path.reverse();

    let local_costs: Vec<f64> = path.iter().map(|&(i, j)| local[i * g + j]).collect();
    let total_cost = local_costs.iter().fold(0.0, |s, c| s + c);
    debug_assert_eq!(total_cost, acc[f * g - 1]);

    let mut phi = vec![0; f];
    for &(i, j) in &path {
        phi[i] = j;
    }
    let weights = (metric == CostMetric::CosineDistance).then(|| {
        phi.iter()
            .enumerate()
            .map(|(i, &j)| cosine_similarity(reference.frame(i), query.frame(j)))
            .collect()
    });

    Ok(AlignmentResult {
        path,
        local_costs,
        total_cost,
        phi,
        weights,
    })
}
