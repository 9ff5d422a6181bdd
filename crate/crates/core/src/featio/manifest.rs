use std::collections::{BTreeMap, HashMap};
use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{read_trajectory_file, FeatureTrajectory};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Articulatory,
    Feature,
}

/// One manifest line: binds a trajectory file to its speaker, word, label
/// and minimal-pair set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub id: String,
    pub speaker: String,
    pub word: String,
    pub label: String,
    pub set_id: String,
    pub path: String,
    pub role: Role,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel_names: Option<Vec<String>>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Manifest {
    pub records: Vec<SampleRecord>,
}

impl Manifest {
    /// Validates id uniqueness and per-set role consistency.
    pub fn new(records: Vec<SampleRecord>) -> Result<Self> {
        let mut ids = HashMap::new();
        let mut roles: HashMap<&str, Role> = HashMap::new();
        for (k, r) in records.iter().enumerate() {
            if ids.insert(r.id.as_str(), k).is_some() {
                return Err(Error::DuplicateId {
                    line: k + 1,
                    id: r.id.clone(),
                });
            }
            if *roles.entry(r.set_id.as_str()).or_insert(r.role) != r.role {
                return Err(Error::MixedRoles {
                    set_id: r.set_id.clone(),
                });
            }
        }
        Ok(Self { records })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&SampleRecord> {
        self.records.iter().find(|r| r.id == id)
    }

    /// Records grouped by set id, in set-id order; records keep file order.
    pub fn by_set(&self) -> BTreeMap<&str, Vec<&SampleRecord>> {
        let mut out: BTreeMap<&str, Vec<&SampleRecord>> = BTreeMap::new();
        for r in &self.records {
            out.entry(r.set_id.as_str()).or_default().push(r);
        }
        out
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("record serializes"));
            out.push('\n');
        }
        out
    }
}

/// Parses a JSON-lines manifest. Blank lines are skipped; every error
/// carries its 1-based line number.
pub fn load_manifest<R: BufRead>(source: R) -> Result<Manifest> {
    let mut records = Vec::new();
    let mut lines_of = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (k, line) in source.lines().enumerate() {
        let line_no = k + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: SampleRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: line_no,
            reason: e.to_string(),
        })?;
        if let Some(first) = seen.get(&record.id) {
            return Err(Error::DuplicateId {
                line: line_no,
                id: format!("{} (first seen on line {first})", record.id),
            });
        }
        seen.insert(record.id.clone(), line_no);
        if let Some(names) = &record.channel_names {
            if names.is_empty() {
                return Err(Error::Parse {
                    line: line_no,
                    reason: "channel_names is empty".into(),
                });
            }
        }
        lines_of.push(line_no);
        records.push(record);
    }
    Manifest::new(records).map_err(|e| match e {
        Error::DuplicateId { line, id } => Error::DuplicateId {
            line: lines_of[line - 1],
            id,
        },
        other => other,
    })
}

/// Reads every record's trajectory, resolving relative paths against
/// `base_dir`. Failures name the offending sample id.
pub fn load_trajectories(
    manifest: &Manifest,
    base_dir: &Path,
) -> Result<HashMap<String, FeatureTrajectory>> {
    let mut out = HashMap::with_capacity(manifest.len());
    for r in &manifest.records {
        let path = base_dir.join(&r.path);
        let mut traj = read_trajectory_file(&path).map_err(|e| e.in_sample(&r.id))?;
        if let Some(names) = &r.channel_names {
            traj = traj
                .with_channel_names(names.clone())
                .map_err(|e| e.in_sample(&r.id))?;
        }
        out.insert(r.id.clone(), traj);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(id: &str, set: &str, role: &str) -> String {
        format!(
            r#"{{"id":"{id}","speaker":"s1","word":"bail","label":"b","set_id":"{set}","path":"{id}.aft","role":"{role}"}}"#
        )
    }

    #[test]
    fn empty_stream_is_empty_manifest() {
        assert!(load_manifest(&b""[..]).unwrap().is_empty());
    }

    #[test]
    fn three_lines_in_order_with_blank_lines_skipped() {
        let text = format!(
            "{}\n\n{}\n   \n{}\n",
            line("a", "x", "articulatory"),
            line("b", "x", "articulatory"),
            line("c", "y", "feature")
        );
        let m = load_manifest(text.as_bytes()).unwrap();
        let ids: Vec<_> = m.records.iter().map(|r| r.id.as_str()).collect();
        assert_eq!(ids, ["a", "b", "c"]);
        assert_eq!(m.records[2].role, Role::Feature);
    }

    #[test]
    fn duplicate_id_names_the_line() {
        let text = format!(
            "{}\n\n{}\n",
            line("a", "x", "feature"),
            line("a", "x", "feature")
        );
        match load_manifest(text.as_bytes()) {
            Err(Error::DuplicateId { line, id }) => {
                assert_eq!(line, 3);
                assert!(id.starts_with('a'));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_field_reports_line() {
        let text = format!(
            "{}\n{}\n",
            line("a", "x", "feature"),
            r#"{"id":"b","speaker":"s","word":"w","label":"l","path":"p","role":"feature"}"#
        );
        match load_manifest(text.as_bytes()) {
            Err(Error::Parse { line, reason }) => {
                assert_eq!(line, 2);
                assert!(reason.contains("set_id"), "{reason}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn malformed_json_reports_line() {
        let text = format!("{}\n{{not json\n", line("a", "x", "feature"));
        assert!(matches!(
            load_manifest(text.as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn unknown_keys_ignored() {
        let text = r#"{"id":"a","speaker":"s","word":"w","label":"l","set_id":"x","path":"p","role":"feature","extra":42}"#;
        assert_eq!(load_manifest(text.as_bytes()).unwrap().len(), 1);
    }

    #[test]
    fn mixed_roles_in_set_rejected() {
        let text = format!(
            "{}\n{}\n",
            line("a", "x", "feature"),
            line("b", "x", "articulatory")
        );
        assert!(matches!(
            load_manifest(text.as_bytes()),
            Err(Error::MixedRoles { .. })
        ));
    }

    #[test]
    fn missing_trajectory_names_sample() {
        let m = load_manifest(line("ghost", "x", "feature").as_bytes()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        match load_trajectories(&m, dir.path()) {
            Err(Error::Sample { id, .. }) => assert_eq!(id, "ghost"),
            other => panic!("{other:?}"),
        }
    }
}
