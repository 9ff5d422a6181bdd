use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::dict::PronEntry;
use super::graph::MinimalPairGraph;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhoneClass {
    Vowel,
    Consonant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PositionClass {
    Vowel,
    Consonant,
    #[default]
    Any,
}

impl PositionClass {
    fn admits(&self, class: PhoneClass) -> bool {
        match self {
            PositionClass::Any => true,
            PositionClass::Vowel => class == PhoneClass::Vowel,
            PositionClass::Consonant => class == PhoneClass::Consonant,
        }
    }
}

/// Phone to vowel/consonant map, as read from a JSON object.
pub type PhoneInventory = BTreeMap<String, PhoneClass>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimalPairSet {
    pub set_id: String,
    /// Index of the contrastive phone.
    pub position: usize,
    /// Phone at `position` for each member, in member order.
    pub contrasts: Vec<String>,
    pub members: Vec<PronEntry>,
}

/// The only differing phone index between two pronunciations, if exactly one.
fn single_difference(a: &PronEntry, b: &PronEntry) -> Option<usize> {
    if a.phones.len() != b.phones.len() {
        return None;
    }
    let mut diff = a
        .phones
        .iter()
        .zip(&b.phones)
        .enumerate()
        .filter(|(_, (x, y))| x != y);
    match (diff.next(), diff.next()) {
        (Some((k, _)), None) => Some(k),
        _ => None,
    }
}

/// Turns cliques into minimal-pair sets.
///
/// A clique is kept only when all its edges contrast the same position and
/// every contrasting phone belongs to `position_class`. The inventory is
/// only consulted for the vowel and consonant classes. Set ids number the
/// kept sets in clique order.
pub fn cliques_to_sets(
    cliques: &[Vec<usize>],
    graph: &MinimalPairGraph,
    position_class: PositionClass,
    inventory: &PhoneInventory,
) -> Result<Vec<MinimalPairSet>> {
    let mut out = Vec::new();
    'cliques: for clique in cliques {
        if clique.len() < 2 {
            continue;
        }
        let Some(position) =
            single_difference(&graph.vertices[clique[0]], &graph.vertices[clique[1]])
        else {
            continue;
        };
        for (a, &u) in clique.iter().enumerate() {
            for &v in &clique[a + 1..] {
                if single_difference(&graph.vertices[u], &graph.vertices[v]) != Some(position) {
                    continue 'cliques;
                }
            }
        }

        let members: Vec<PronEntry> = clique.iter().map(|&v| graph.vertices[v].clone()).collect();
        let contrasts: Vec<String> = members.iter().map(|m| m.phones[position].clone()).collect();
        if position_class != PositionClass::Any {
            for phone in &contrasts {
                let class = inventory
                    .get(phone)
                    .ok_or_else(|| Error::UnmappedPhone(phone.clone()))?;
                if !position_class.admits(*class) {
                    continue 'cliques;
                }
            }
        }
        out.push(MinimalPairSet {
            set_id: String::new(),
            position,
            contrasts,
            members,
        });
    }
    for (k, set) in out.iter_mut().enumerate() {
        set.set_id = format!("mp{:05}", k + 1);
    }
    Ok(out)
}
