//! Slow reference implementations and random input generators.
#![allow(dead_code)]

use std::collections::BTreeMap;

use mpeval_core::align::CostMetric;
use mpeval_core::minpair::{PronDict, PronEntry};
use mpeval_core::FeatureTrajectory;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn local_cost(a: &[f64], b: &[f64], metric: CostMetric) -> f64 {
    match metric {
        CostMetric::Euclidean => {
            let mut s = 0.0;
            for k in 0..a.len() {
                s += (a[k] - b[k]) * (a[k] - b[k]);
            }
            s.sqrt()
        }
        CostMetric::CosineDistance => {
            let (mut dot, mut na, mut nb) = (0.0, 0.0, 0.0);
            for k in 0..a.len() {
                dot += a[k] * b[k];
                na += a[k] * a[k];
                nb += b[k] * b[k];
            }
            1.0 - dot / (na.sqrt() * nb.sqrt())
        }
    }
}

/// Minimum path cost over every monotone path, summed from the first cell.
pub fn brute_force_dtw(reference: &[Vec<f64>], query: &[Vec<f64>], metric: CostMetric) -> f64 {
    fn walk(
        i: usize,
        j: usize,
        acc: f64,
        r: &[Vec<f64>],
        q: &[Vec<f64>],
        m: CostMetric,
        best: &mut f64,
    ) {
        let acc = acc + local_cost(&r[i], &q[j], m);
        if i + 1 == r.len() && j + 1 == q.len() {
            *best = best.min(acc);
            return;
        }
        if i + 1 < r.len() && j + 1 < q.len() {
            walk(i + 1, j + 1, acc, r, q, m, best);
        }
        if i + 1 < r.len() {
            walk(i + 1, j, acc, r, q, m, best);
        }
        if j + 1 < q.len() {
            walk(i, j + 1, acc, r, q, m, best);
        }
    }
    let mut best = f64::INFINITY;
    walk(0, 0, 0.0, reference, query, metric, &mut best);
    best
}

pub fn random_rows(rng: &mut ChaCha8Rng, frames: usize, channels: usize) -> Vec<Vec<f64>> {
    (0..frames)
        .map(|_| (0..channels).map(|_| rng.gen_range(-3.0..3.0)).collect())
        .collect()
}

pub fn trajectory(rows: &[Vec<f64>]) -> FeatureTrajectory {
    FeatureTrajectory::from_rows(rows, 100.0).unwrap()
}

pub fn random_adjacency(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    adj
}

/// Maximal cliques of size >= min_size by checking all 2^n vertex subsets.
pub fn subset_cliques(adj: &[Vec<usize>], min_size: usize) -> Vec<Vec<usize>> {
    let n = adj.len();
    let connected = |u: usize, v: usize| adj[u].contains(&v);
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        let members: Vec<usize> = (0..n).filter(|v| mask & (1 << v) != 0).collect();
        let complete = members
            .iter()
            .enumerate()
            .all(|(a, &u)| members[a + 1..].iter().all(|&v| connected(u, v)));
        if !complete || members.len() < min_size {
            continue;
        }
        let extendable = (0..n)
            .filter(|v| mask & (1 << v) == 0)
            .any(|v| members.iter().all(|&u| connected(u, v)));
        if !extendable {
            out.push(members);
        }
    }
    out.sort();
    out
}

pub fn random_dict(
    rng: &mut ChaCha8Rng,
    entries: usize,
    alphabet: usize,
    max_len: usize,
) -> PronDict {
    let phones: Vec<String> = (0..alphabet).map(|k| format!("p{k}")).collect();
    PronDict {
        entries: (0..entries)
            .map(|k| {
                let len = rng.gen_range(1..=max_len);
                PronEntry {
                    word: format!("w{k}"),
                    phones: (0..len)
                        .map(|_| phones[rng.gen_range(0..alphabet)].clone())
                        .collect(),
                }
            })
            .collect(),
    }
}

/// Edges `(u, v, position)` between entries at Hamming distance exactly 1.
pub fn hamming_edges(dict: &PronDict) -> Vec<(usize, usize, usize)> {
    let mut out = BTreeMap::new();
    for (u, a) in dict.entries.iter().enumerate() {
        for (v, b) in dict.entries.iter().enumerate().skip(u + 1) {
            if a.phones.len() != b.phones.len() {
                continue;
            }
            let diffs: Vec<usize> = (0..a.phones.len())
                .filter(|&k| a.phones[k] != b.phones[k])
                .collect();
            if diffs.len() == 1 {
                out.insert((u, v), diffs[0]);
            }
        }
    }
    out.into_iter().map(|((u, v), p)| (u, v, p)).collect()
}
