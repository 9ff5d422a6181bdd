use std::collections::HashMap;
use std::fs::{self, File};
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use mpeval_core::eval::TargetTable;
use mpeval_core::featio::{load_manifest, load_trajectories, read_trajectory_file, Manifest};
use mpeval_core::FeatureTrajectory;
use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;
use crate::error::CliError;

pub fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::io(path, e))
}

fn in_file(path: &Path, err: mpeval_core::Error) -> CliError {
    let mut e = CliError::from(err);
    e.message = format!("{}: {}", path.display(), e.message);
    e
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    serde_json::from_reader(open(path)?)
        .map_err(|e| CliError::parse(format!("{}: {e}", path.display())))
}

pub fn read_targets(path: &Path) -> Result<TargetTable, CliError> {
    TargetTable::from_jsonl(open(path)?).map_err(|e| in_file(path, e))
}

pub fn read_trajectory(path: &Path) -> Result<FeatureTrajectory, CliError> {
    read_trajectory_file(path).map_err(|e| in_file(path, e))
}

/// Loads the manifest and every trajectory it lists.
pub fn read_corpus(
    manifest_path: &Path,
    base_dir: Option<&Path>,
) -> Result<(Manifest, HashMap<String, FeatureTrajectory>), CliError> {
    let manifest = load_manifest(open(manifest_path)?).map_err(|e| in_file(manifest_path, e))?;
    let base: PathBuf = match base_dir {
        Some(dir) => dir.to_path_buf(),
        None => manifest_path
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_default(),
    };
    let trajectories = load_trajectories(&manifest, &base)?;
    eprintln!(
        "loaded {} samples from {}",
        manifest.len(),
        manifest_path.display()
    );
    Ok((manifest, trajectories))
}

/// Writes `text` to `out`, or to stdout.
pub fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::data(format!("stdout: {e}")))
        }
    }
}

/// The run configuration with command-specific options merged in.
pub fn config_echo(run: Option<&RunConfig>, options: Value) -> Value {
    let mut echo = match run {
        Some(c) => serde_json::to_value(c).expect("config serializes"),
        None => Value::Object(Default::default()),
    };
    if let (Value::Object(map), Value::Object(extra)) = (&mut echo, options) {
        map.extend(extra);
    }
    echo
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: Value,
    #[serde(flatten)]
    result: T,
}

/// A single pretty-printed JSON report followed by a newline.
pub fn report<T: Serialize>(command: &str, config: Value, result: T) -> String {
    let mut text = serde_json::to_string_pretty(&Report {
        tool: "mpeval",
        version: env!("CARGO_PKG_VERSION"),
        command,
        config,
        result,
    })
    .expect("report serializes");
    text.push('\n');
    text
}
