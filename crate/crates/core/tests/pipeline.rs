use std::fs::File;
use std::io::BufReader;

use mpeval_core::align::CostMetric;
use mpeval_core::eval::{
    build_targets, loo_classification_accuracy, voicing_score, Preprocess, RandomProjection,
    SvmConfig, VoicingSpec,
};
use mpeval_core::featio::{load_manifest, load_trajectories};
use mpeval_core::synth::{articulatory_suite, feature_suite, FeatureSuiteSpec, SuiteSpec};

#[test]
fn articulatory_suite_through_files() {
    let dir = tempfile::tempdir().unwrap();
    articulatory_suite(&SuiteSpec::default(), 21)
        .write_to(dir.path())
        .unwrap();

    let manifest = load_manifest(BufReader::new(
        File::open(dir.path().join("manifest.jsonl")).unwrap(),
    ))
    .unwrap();
    let trajectories = load_trajectories(&manifest, dir.path()).unwrap();
    let table = build_targets(
        &manifest,
        &trajectories,
        CostMetric::Euclidean,
        &Preprocess::default(),
    )
    .unwrap();
    assert_eq!(table.rows.len(), 120);
    assert!(table.rows.iter().all(|r| (40..=60).contains(&r.frame)));

    let report = loo_classification_accuracy(&table, &SvmConfig::default()).unwrap();
    assert!(
        report.pooled_accuracy >= 0.95,
        "accuracy {}",
        report.pooled_accuracy
    );
}

#[test]
fn projected_features_score_near_half() {
    let suite = feature_suite(
        &FeatureSuiteSpec {
            dim: 256,
            ..FeatureSuiteSpec::default()
        },
        3,
    );
    let spec = VoicingSpec {
        anchor_pairs: vec![("b".into(), "p".into())],
        contrast_labels: ["f", "t", "k", "s"].map(String::from).to_vec(),
        set_id: None,
    };
    let mut total = 0.0;
    let seeds = 10;
    for seed in 0..seeds {
        let projection = RandomProjection::new(256, 16, seed).unwrap();
        let projected = projection.apply_all(&suite.trajectories).unwrap();
        let table = build_targets(
            &suite.manifest,
            &projected,
            CostMetric::Euclidean,
            &Preprocess::default(),
        )
        .unwrap();
        total += voicing_score(&table, &spec).unwrap().voicing_score;
    }
    let mean = total / seeds as f64;
    assert!((0.2..=0.8).contains(&mean), "mean voicing score {mean}");
}
