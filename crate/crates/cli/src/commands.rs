use std::collections::BTreeMap;
use std::fs;

use mpeval_core::align::{similarity_matrix, SpeakerSample};
use mpeval_core::consist::{
    build_batch_from_features, loss_breakdown, total_loss_grad, BatchSidecar, ConsistencyBatch,
};
use mpeval_core::eval::{
    build_targets, loo_classification_accuracy, preprocess, shuffle_labels, voicing_score,
    RandomProjection, SvmConfig, VoicingSpec,
};
use mpeval_core::featio::write_trajectory_file;
use mpeval_core::minpair::{
    build_graph, cliques_to_sets, enumerate_cliques, parse_mfa_dict, PhoneInventory,
};
use mpeval_core::synth::{articulatory_suite, feature_suite, FeatureSuiteSpec, SuiteSpec};
use mpeval_core::FeatureTrajectory;
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::io::{config_echo, emit, read_corpus, read_json, read_targets, read_trajectory, report};
use crate::{
    ClassifyArgs, ConsistencyArgs, ExtractTargetsArgs, FindPairsArgs, PipelineArgs, SimilarityArgs,
    SynthKind, VoicingArgs,
};

impl PipelineArgs {
    fn run_config(&self) -> Result<RunConfig, CliError> {
        let mut config = RunConfig::load(self.config.as_deref())?;
        if let Some(m) = self.metric {
            config.metric = m.into();
        }
        if self.no_znorm {
            config.znorm = false;
        }
        if self.no_filter {
            config.filter = None;
        }
        Ok(config)
    }
}

pub fn find_pairs(args: FindPairsArgs) -> Result<(), CliError> {
    let dict = parse_mfa_dict(crate::io::open(&args.dict)?).map_err(|e| {
        let mut e = CliError::from(e);
        e.message = format!("{}: {}", args.dict.display(), e.message);
        e
    })?;
    let inventory: PhoneInventory = match &args.inventory {
        Some(path) => read_json(path)?,
        None => PhoneInventory::new(),
    };
    if args.min_size < 2 {
        return Err(CliError::parse("--min-size must be at least 2"));
    }
    let graph = build_graph(&dict);
    let cliques = enumerate_cliques(&graph, args.min_size);
    let mut sets = cliques_to_sets(&cliques, &graph, args.class_filter.into(), &inventory)?;
    eprintln!(
        "{} pronunciations, {} edges, {} cliques, {} sets",
        graph.len(),
        graph.edge_count(),
        cliques.len(),
        sets.len()
    );
    if let Some(max) = args.max_sets {
        if sets.len() > max {
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            let mut keep = index::sample(&mut rng, sets.len(), max).into_vec();
            keep.sort_unstable();
            let mut all: Vec<Option<_>> = sets.into_iter().map(Some).collect();
            sets = keep.into_iter().map(|k| all[k].take().unwrap()).collect();
        }
    }
    let mut text = String::new();
    for set in &sets {
        text.push_str(&serde_json::to_string(set).expect("set serializes"));
        text.push('\n');
    }
    emit(args.out.as_deref(), &text)
}

pub fn extract_targets(args: ExtractTargetsArgs) -> Result<(), CliError> {
    let config = args.pipeline.run_config()?;
    let (manifest, mut trajectories) =
        read_corpus(&args.pipeline.manifest, args.pipeline.base_dir.as_deref())?;
    if let (Some(dim), Some(seed)) = (args.project_dim, args.project_seed) {
        let in_dim = manifest
            .records
            .first()
            .map(|r| trajectories[&r.id].channels())
            .ok_or_else(|| CliError::data("manifest is empty"))?;
        let projection = RandomProjection::new(in_dim, dim, seed)?;
        trajectories = projection.apply_all(&trajectories)?;
        eprintln!("projected {in_dim} -> {dim} channels");
    }
    let table = build_targets(
        &manifest,
        &trajectories,
        config.metric,
        &config.preprocess(),
    )?;
    eprintln!("extracted {} targets", table.rows.len());
    emit(args.out.as_deref(), &table.to_jsonl())
}

#[derive(Serialize)]
struct ClassifyResult {
    accuracy: f64,
    macro_accuracy: f64,
    samples: usize,
    per_set: BTreeMap<String, mpeval_core::eval::SetAccuracy>,
    predictions: Vec<(String, String)>,
}

pub fn classify(args: ClassifyArgs) -> Result<(), CliError> {
    let mut config = RunConfig::load(args.config.as_deref())?;
    let seed = config.require_seed(args.seed)?;
    if let Some(c) = args.svm_c {
        config.svm_c = c;
        config.validate()?;
    }
    let mut table = read_targets(&args.targets)?;
    if args.shuffle_labels {
        table = shuffle_labels(&table, seed);
    }
    let svm = SvmConfig {
        c: config.svm_c,
        epochs: args.epochs,
        seed,
    };
    let loo = loo_classification_accuracy(&table, &svm)?;
    let echo = config_echo(
        Some(&config),
        json!({ "targets": args.targets, "epochs": args.epochs, "shuffle_labels": args.shuffle_labels }),
    );
    let result = ClassifyResult {
        accuracy: loo.pooled_accuracy,
        macro_accuracy: loo.macro_accuracy,
        samples: table.rows.len(),
        per_set: loo.per_set,
        predictions: loo.predictions,
    };
    emit(args.out.as_deref(), &report("classify", echo, result))
}

pub fn voicing(args: VoicingArgs) -> Result<(), CliError> {
    let spec: VoicingSpec = read_json(&args.spec)?;
    let table = read_targets(&args.targets)?;
    let result = voicing_score(&table, &spec)?;
    let echo = config_echo(None, json!({ "targets": args.targets, "spec": spec }));
    emit(args.out.as_deref(), &report("voicing-score", echo, result))
}

pub fn similarity(args: SimilarityArgs) -> Result<(), CliError> {
    let config = args.pipeline.run_config()?;
    let (manifest, trajectories) =
        read_corpus(&args.pipeline.manifest, args.pipeline.base_dir.as_deref())?;
    let processed = preprocess(&manifest, &trajectories, &config.preprocess())?;
    let mut groups: BTreeMap<String, Vec<SpeakerSample<'_>>> = BTreeMap::new();
    for r in &manifest.records {
        if args.set.as_ref().is_some_and(|s| s != &r.set_id) {
            continue;
        }
        groups
            .entry(r.label.clone())
            .or_default()
            .push(SpeakerSample {
                speaker: &r.speaker,
                trajectory: &processed[&r.id],
            });
    }
    let matrix = similarity_matrix(&groups)?;
    let echo = config_echo(
        Some(&config),
        json!({ "manifest": args.pipeline.manifest, "set": args.set }),
    );
    emit(
        args.out.as_deref(),
        &report("similarity-matrix", echo, matrix),
    )
}

#[derive(Serialize)]
struct ConsistencyResult {
    l_st: f64,
    l_c: f64,
    total: f64,
    alpha: f64,
    frames: usize,
    paired_frames: usize,
    dims: usize,
    negative_weights: usize,
}

pub fn consistency(args: ConsistencyArgs) -> Result<(), CliError> {
    let mut config = RunConfig::load(args.config.as_deref())?;
    let y_hat = read_trajectory(&args.y_hat)?.into_data();
    let y_frozen = read_trajectory(&args.y_frozen)?.into_data();
    let y_hat_star = read_trajectory(&args.y_hat_star)?.into_data();

    let mut batch = match (&args.sidecar, &args.features, &args.features_star) {
        (Some(path), _, _) => {
            let mut sidecar: BatchSidecar = read_json(path)?;
            if let Some(alpha) = args.alpha {
                sidecar.alpha = alpha;
            }
            ConsistencyBatch::from_sidecar(y_hat, y_frozen, y_hat_star, sidecar)?
        }
        (None, Some(w), Some(w_star)) => {
            let alpha = args.alpha.unwrap_or(config.alpha);
            build_batch_from_features(
                &read_trajectory(w)?,
                &read_trajectory(w_star)?,
                y_hat,
                y_frozen,
                y_hat_star,
                alpha,
            )?
        }
        _ => {
            return Err(CliError::parse(
                "pass either --sidecar or both --features and --features-star",
            ))
        }
    };
    if args.clamp_weights {
        batch = batch.clamp_weights();
    }
    config.alpha = batch.alpha;

    let losses = loss_breakdown(&batch)?;
    if let Some(dir) = &args.grad_out {
        let grads = total_loss_grad(&batch)?;
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        for (name, grad) in [
            ("grad_y_hat.aft", grads.y_hat),
            ("grad_y_hat_star.aft", grads.y_hat_star),
        ] {
            let traj = FeatureTrajectory::new(grad, 1.0)?;
            write_trajectory_file(&traj, dir.join(name))?;
        }
    }
    if let Some(path) = &args.sidecar_out {
        let text = serde_json::to_string_pretty(&batch.sidecar()).expect("sidecar serializes");
        fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))?;
    }
    let echo = config_echo(
        Some(&config),
        json!({ "clamp_weights": args.clamp_weights, "sidecar": args.sidecar, "features": args.features, "features_star": args.features_star }),
    );
    let result = ConsistencyResult {
        l_st: losses.l_st,
        l_c: losses.l_c,
        total: losses.total,
        alpha: losses.alpha,
        frames: batch.y_hat.nrows(),
        paired_frames: batch.y_hat_star.nrows(),
        dims: batch.y_hat.ncols(),
        negative_weights: batch.c.iter().filter(|c| **c < 0.0).count(),
    };
    emit(
        args.out.as_deref(),
        &report("consistency-loss", echo, result),
    )
}

pub fn synth(kind: SynthKind) -> Result<(), CliError> {
    let (suite, out) = match kind {
        SynthKind::Articulatory {
            out,
            seed,
            speakers,
            classes,
            repetitions,
            frames,
            channels,
        } => {
            if speakers == 0 || classes < 2 || repetitions == 0 || channels == 0 || frames < 20 {
                return Err(CliError::parse(
                    "need at least 1 speaker, 2 classes, 1 repetition, 1 channel and 20 frames",
                ));
            }
            let spec = SuiteSpec {
                speakers,
                classes,
                repetitions,
                frames,
                channels,
                ..SuiteSpec::default()
            };
            (articulatory_suite(&spec, seed), out)
        }
        SynthKind::Features {
            out,
            seed,
            speakers,
            dim,
            frames,
            labels,
        } => {
            if speakers == 0 || dim == 0 || frames < 20 || labels.len() < 2 {
                return Err(CliError::parse(
                    "need at least 1 speaker, 1 dimension, 20 frames and 2 labels",
                ));
            }
            let spec = FeatureSuiteSpec {
                speakers,
                labels,
                frames,
                dim,
                ..FeatureSuiteSpec::default()
            };
            (feature_suite(&spec, seed), out)
        }
    };
    suite.write_to(&out)?;
    let summary = json!({
        "manifest": out.join("manifest.jsonl"),
        "samples": suite.manifest.len(),
    });
    emit(None, &format!("{summary}\n"))
}
