use std::path::{Path, PathBuf};
use std::process::Command;

use evoqnn::artifacts::{self as art, read_json, read_records_csv, MissingArtifact, RunManifest};
use evoqnn::commands::{
    cmd_baseline, cmd_compare_backends, cmd_infer, cmd_select, cmd_train, CompareInputs, InferInputs,
};
use evoqnn::config::{BackendKind, Overrides, RunConfig};
use evoqnn::report::cmd_report;
use evoqnn_core::circuit::resource_count;
use evoqnn_core::ga::{FitnessRecord, Stage};
use evoqnn_core::rng::{self, tag};
use evoqnn_core::{Chromosome, ParameterPool};

#[allow(dead_code)]
#[path = "../../core/tests/support/tables.rs"]
mod tables;

fn synthetic(out: &Path, set: &[&str]) -> RunConfig {
    let mut all = vec![
        "train_per_class=40",
        "test_per_class=20",
        "population_size=6",
        "generations=2",
    ];
    all.extend_from_slice(set);
    let o = Overrides {
        set: all.iter().map(|s| s.to_string()).collect(),
        seed: Some(7),
        out: Some(out.to_path_buf()),
        synthetic: true,
        ..Overrides::default()
    };
    RunConfig::load(None, &o).unwrap()
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_evoqnn"))
}

fn listed(dir: &Path) -> Vec<String> {
    RunManifest::load(dir).unwrap().artifacts.into_keys().collect()
}

fn files_in(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n != art::MANIFEST)
        .collect();
    names.sort();
    names
}

#[test]
fn train_writes_listed_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let config = synthetic(dir.path(), &[]);
    cmd_train(&config).unwrap();
    let rows = read_records_csv(&dir.path().join(art::TRAIN_CSV)).unwrap();
    assert_eq!(rows.len(), 12);
    assert!(rows
        .iter()
        .all(|r| r.stage == "train" && resource_count(&r.chromosome).rx == r.rx));
    let text = std::fs::read_to_string(dir.path().join(art::TRAIN_CSV)).unwrap();
    assert!(text.starts_with("stage,generation,index,chromosome,fitness,rx,cnot,seconds\n"));
    assert_eq!(listed(dir.path()), files_in(dir.path()));
    assert_eq!(listed(dir.path()), [art::FINAL_POPULATION, art::POOL, art::TRAIN_CSV]);
    let pool: ParameterPool = read_json(&dir.path().join(art::POOL)).unwrap();
    assert_eq!(pool.revision(), 2);
}

#[test]
fn train_is_byte_reproducible() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    cmd_train(&synthetic(a.path(), &[])).unwrap();
    cmd_train(&synthetic(b.path(), &[])).unwrap();
    for name in files_in(a.path()).iter().map(String::as_str).chain([art::MANIFEST]) {
        assert_eq!(
            std::fs::read(a.path().join(name)).unwrap(),
            std::fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn missing_data_dir_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().args(["train", "--out"]).arg(dir.path()).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("data_dir"));
    assert!(!dir.path().join(art::MANIFEST).exists());
    let out = bin()
        .args(["train", "--set", "data_dir='/nonexistent/mnist'", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn zero_epoch_baseline_keeps_the_initial_pool() {
    let dir = tempfile::tempdir().unwrap();
    let config = synthetic(dir.path(), &["epochs=0"]);
    let (pool, _) = cmd_baseline(&config).unwrap();
    let init = ParameterPool::init(4, 2, 4, &mut rng::stream(7, &[tag::POOL_INIT])).unwrap();
    assert_eq!(pool.digest(), init.digest());
    assert_eq!(pool.revision(), 1);
    let reread: ParameterPool = read_json(&dir.path().join(art::POOL_REGULAR)).unwrap();
    assert_eq!(reread, pool);

    let again = tempfile::tempdir().unwrap();
    cmd_baseline(&synthetic(again.path(), &["epochs=0"])).unwrap();
    assert_eq!(
        std::fs::read(dir.path().join(art::POOL_REGULAR)).unwrap(),
        std::fs::read(again.path().join(art::POOL_REGULAR)).unwrap()
    );
    assert!(RunManifest::load(dir.path())
        .unwrap()
        .metrics
        .contains_key("baseline_accuracy"));
}

#[test]
fn infer_contracts() {
    let dir = tempfile::tempdir().unwrap();
    let config = synthetic(dir.path(), &[]);
    let trained = cmd_train(&config).unwrap();

    let zero = synthetic(dir.path(), &["generations=0"]);
    let out = cmd_infer(&zero, &InferInputs::default()).unwrap();
    assert!(out.logs.is_empty());
    let mut seeds: Vec<Chromosome> = trained.final_population.iter().map(|r| r.chromosome).collect();
    let mut got: Vec<Chromosome> = out.ranked.iter().map(|r| r.chromosome).collect();
    seeds.sort();
    got.sort();
    assert_eq!(got, seeds);
    assert!(out.ranked.iter().all(|r| r.generation == 0));
    assert_eq!(out.digest, trained.pool.digest());

    let run = bin()
        .args(["infer", "--synthetic", "--seed", "7", "--out"])
        .arg(dir.path())
        .args([
            "--set",
            "train_per_class=40",
            "--set",
            "test_per_class=20",
            "--set",
            "population_size=6",
        ])
        .output()
        .unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(
        stdout.contains(&format!("pool digest {} unchanged", trained.pool.digest())),
        "{stdout}"
    );

    let missing = bin()
        .args(["infer", "--synthetic", "--pool", "/nonexistent/pool.json", "--out"])
        .arg(dir.path())
        .args(["--set", "population_size=6"])
        .output()
        .unwrap();
    assert!(!missing.status.success());
    assert!(String::from_utf8_lossy(&missing.stderr).contains("missing artifact"));
}

fn published_ranked(dir: &Path) -> PathBuf {
    let records: Vec<FitnessRecord> = tables::FINAL_INFERENCE
        .iter()
        .enumerate()
        .map(|(index, &(genes, fitness, _, _, _))| {
            let chromosome = Chromosome::new(genes);
            FitnessRecord {
                stage: Stage::Inference,
                generation: 5,
                index,
                chromosome,
                fitness,
                resources: resource_count(&chromosome),
                seconds: None,
            }
        })
        .collect();
    let path = dir.join("published.json");
    std::fs::write(&path, serde_json::to_string(&records).unwrap()).unwrap();
    path
}

#[test]
fn select_on_the_published_final_generation() {
    let dir = tempfile::tempdir().unwrap();
    let ranked = published_ranked(dir.path());
    let config = synthetic(dir.path(), &["top_k=3"]);
    let sel = cmd_select(&config, Some(&ranked)).unwrap();
    assert_eq!(sel.rows[0].chromosome, Chromosome::new([3, 2, 2, 1, 2]));
    assert_eq!(sel.rows[0].fitness, 0.870);
    assert_eq!(sel.rows[0].resources, "5 RX, 3 CNOT");
    assert_eq!(sel.rows.len(), 3);

    let out = bin()
        .args(["select", "--top-k", "4", "--out"])
        .arg(dir.path())
        .arg("--ranked")
        .arg(&ranked)
        .output()
        .unwrap();
    assert!(out.status.success());
    let table = String::from_utf8_lossy(&out.stdout);
    assert!(table.contains("5 RX, 3 CNOT"));
    let starred: Vec<&str> = table.lines().filter(|l| l.starts_with('*')).collect();
    assert_eq!(starred.len(), 4);
    let highlighted: Vec<String> = tables::FINAL_INFERENCE
        .iter()
        .filter(|r| r.4)
        .map(|r| Chromosome::new(r.0).to_string())
        .collect();
    for h in &highlighted {
        assert!(starred.iter().any(|l| l.contains(h.as_str())), "{h} not starred");
    }

    let empty = cmd_select(&synthetic(dir.path(), &["top_k=0"]), Some(&ranked)).unwrap();
    assert!(empty.rows.is_empty());
    assert!(cmd_select(&synthetic(dir.path(), &["top_k=11"]), Some(&ranked)).is_err());
}

#[test]
fn identical_pools_compare_to_zero() {
    let dir = tempfile::tempdir().unwrap();
    let config = synthetic(dir.path(), &[]);
    cmd_train(&config).unwrap();
    let pool = dir.path().join(art::POOL);
    let rows = cmd_compare_backends(
        &config,
        &CompareInputs {
            ga_pool: Some(pool.clone()),
            regular_pool: Some(pool),
            ..CompareInputs::default()
        },
    )
    .unwrap();
    assert_eq!(rows.iter().map(|r| r.backend).collect::<Vec<_>>(), BackendKind::ALL);
    assert!(rows.iter().all(|r| r.delta == 0.0 && r.ga_best == r.regular_best));

    cmd_baseline(&config).unwrap();
    cmd_compare_backends(&config, &CompareInputs::default()).unwrap();
    let text = std::fs::read_to_string(dir.path().join(art::COMPARE_CSV)).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "backend,ga_best,regular_best,delta");
    assert_eq!(lines.len(), 4);
    for line in &lines[1..] {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), 4);
        assert!(cells[3].starts_with('+') || cells[3].starts_with('-'), "{line}");
    }
}

#[test]
fn report_sections_follow_the_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let err = cmd_report(dir.path()).unwrap_err();
    assert!(err.downcast_ref::<MissingArtifact>().is_some());

    let config = synthetic(dir.path(), &[]);
    cmd_train(&config).unwrap();
    let train_only = cmd_report(dir.path()).unwrap();
    assert!(train_only.contains("## Training generations"));
    assert!(!train_only.contains("## Inference generations"));
    assert!(!train_only.contains("## Backend comparison"));

    cmd_baseline(&config).unwrap();
    cmd_infer(&config, &InferInputs::default()).unwrap();
    cmd_select(&config, None).unwrap();
    cmd_compare_backends(&config, &CompareInputs::default()).unwrap();
    let full = cmd_report(dir.path()).unwrap();
    for section in [
        "## Training generations",
        "## Conventionally trained macroCircuit",
        "## Inference generations",
        "## Final inference population",
        "## Backend comparison",
        "Convergence:",
    ] {
        assert!(full.contains(section), "missing {section}");
    }
    assert_eq!(cmd_report(dir.path()).unwrap(), full);
    assert_eq!(std::fs::read_to_string(dir.path().join(art::REPORT)).unwrap(), full);
    assert_eq!(listed(dir.path()), files_in(dir.path()));

    std::fs::remove_file(dir.path().join(art::INFER_CSV)).unwrap();
    let err = cmd_report(dir.path()).unwrap_err();
    assert!(err.downcast_ref::<MissingArtifact>().is_some());
}
