//! Maximal clique enumeration (Bron-Kerbosch with pivoting).
//!
//! The outer loop visits vertices in id order, seeding each branch with the
//! later neighbors as candidates and the earlier ones as excluded, so every
//! maximal clique is reported once, from its smallest vertex. Inside a
//! branch the pivot is the vertex of `P ∪ X` with the most neighbors in `P`
//! (smallest id on ties).

use super::graph::MinimalPairGraph;

pub fn enumerate_cliques(graph: &MinimalPairGraph, min_size: usize) -> Vec<Vec<usize>> {
    enumerate_cliques_in(graph.adjacency(), min_size)
}

/// Maximal cliques of size `>= min_size` of the undirected graph given by
/// sorted, symmetric neighbor lists. Cliques are sorted internally and the
/// list is sorted lexicographically.
pub fn enumerate_cliques_in(adjacency: &[Vec<usize>], min_size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut r = Vec::new();
    for v in 0..adjacency.len() {
        let (x, p): (Vec<usize>, Vec<usize>) = adjacency[v].iter().partition(|&&u| u < v);
        r.push(v);
        expand(adjacency, &mut r, p, x, min_size, &mut out);
        r.pop();
    }
    for c in &mut out {
        c.sort_unstable();
    }
    out.sort();
    out
}

fn expand(
    adjacency: &[Vec<usize>],
    r: &mut Vec<usize>,
    mut p: Vec<usize>,
    mut x: Vec<usize>,
    min_size: usize,
    out: &mut Vec<Vec<usize>>,
) {
    if p.is_empty() {
        if x.is_empty() && r.len() >= min_size {
            out.push(r.clone());
        }
        return;
    }
    if r.len() + p.len() < min_size {
        return;
    }

    let pivot = p
        .iter()
        .chain(&x)
        .copied()
        .map(|u| (intersection_len(&p, &adjacency[u]), u))
        .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)))
        .map(|(_, u)| u)
        .unwrap();
    let candidates: Vec<usize> = p
        .iter()
        .copied()
        .filter(|v| adjacency[pivot].binary_search(v).is_err())
        .collect();

    for v in candidates {
        let nv = &adjacency[v];
        r.push(v);
        expand(
            adjacency,
            r,
            intersect(&p, nv),
            intersect(&x, nv),
            min_size,
            out,
        );
        r.pop();
        let at = p.binary_search(&v).unwrap();
        p.remove(at);
        let at = x.binary_search(&v).unwrap_err();
        x.insert(at, v);
    }
}

fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small
        .iter()
        .copied()
        .filter(|v| large.binary_search(v).is_ok())
        .collect()
}

fn intersection_len(a: &[usize], b: &[usize]) -> usize {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small
        .iter()
        .filter(|v| large.binary_search(v).is_ok())
        .count()
}
