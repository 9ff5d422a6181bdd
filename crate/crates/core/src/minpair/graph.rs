use std::collections::{BTreeMap, HashMap};

use super::dict::{PronDict, PronEntry};

/// Pronunciations linked when they differ by exactly one phone substitution.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimalPairGraph {
    pub vertices: Vec<PronEntry>,
    adjacency: Vec<Vec<usize>>,
    /// `(u, v)` with `u < v` mapped to the index of the differing phone.
    edges: BTreeMap<(usize, usize), usize>,
}

impl MinimalPairGraph {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Sorted neighbor lists, one per vertex.
    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// `(u, v, position)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.edges.iter().map(|(&(u, v), &p)| (u, v, p))
    }

    pub fn position(&self, u: usize, v: usize) -> Option<usize> {
        self.edges.get(&(u.min(v), u.max(v))).copied()
    }
}

/// Builds the graph by hashing every pronunciation once per position with
/// that position masked; two pronunciations are one substitution apart iff
/// they share such a bucket.
pub fn build_graph(dict: &PronDict) -> MinimalPairGraph {
    let vertices = dict.entries.clone();
    let mut buckets: HashMap<(usize, Vec<&str>), Vec<usize>> = HashMap::new();
    for (id, entry) in vertices.iter().enumerate() {
        for pos in 0..entry.phones.len() {
            let masked: Vec<&str> = entry
                .phones
                .iter()
                .enumerate()
                .map(|(k, p)| if k == pos { "" } else { p.as_str() })
                .collect();
            buckets.entry((pos, masked)).or_default().push(id);
        }
    }

    let mut edges = BTreeMap::new();
    for ((pos, _), members) in &buckets {
        for (a, &u) in members.iter().enumerate() {
            for &v in &members[a + 1..] {
                // Homophones share every bucket but are not minimal pairs.
                if vertices[u].phones[*pos] != vertices[v].phones[*pos] {
                    edges.insert((u.min(v), u.max(v)), *pos);
                }
            }
        }
    }

    let mut adjacency = vec![Vec::new(); vertices.len()];
    for &(u, v) in edges.keys() {
        adjacency[u].push(v);
        adjacency[v].push(u);
    }
    for list in &mut adjacency {
        list.sort_unstable();
    }
    MinimalPairGraph {
        vertices,
        adjacency,
        edges,
    }
}
