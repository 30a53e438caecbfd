//! Markdown summary of a run directory, built only from manifest-listed
//! artifacts.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use evoqnn_core::ga::FitnessRecord;

use crate::artifacts::{self as art, read_json, read_records_csv, CsvRow, Recorder, RunManifest};
use crate::commands::{read_comparison, Selection};

fn generation_grid(out: &mut String, rows: &[CsvRow]) {
    let mut by_gen: BTreeMap<usize, Vec<&CsvRow>> = BTreeMap::new();
    for r in rows {
        by_gen.entry(r.generation).or_default().push(r);
    }
    let width = by_gen.values().map(Vec::len).max().unwrap_or(0);
    out.push_str("| Index |");
    for g in by_gen.keys() {
        let _ = write!(out, " Gen {g} |");
    }
    out.push_str("\n|---|");
    out.push_str(&"---|".repeat(by_gen.len()));
    out.push('\n');
    for i in 0..width {
        let _ = write!(out, "| {} |", i + 1);
        for recs in by_gen.values() {
            match recs.iter().find(|r| r.index == i) {
                Some(r) => {
                    let _ = write!(out, " `{}` {:.3} |", r.chromosome, r.fitness);
                }
                None => out.push_str(" |"),
            }
        }
        out.push('\n');
    }

    out.push_str("\nConvergence:\n\n| Generation | Best | Mean |\n|---|---|---|\n");
    for (g, recs) in &by_gen {
        let best = recs.iter().map(|r| r.fitness).fold(f64::NEG_INFINITY, f64::max);
        let mean = recs.iter().map(|r| r.fitness).sum::<f64>() / recs.len() as f64;
        let _ = writeln!(out, "| {g} | {best:.3} | {mean:.3} |");
    }
}

/// Renders the report for `dir`, writes `report.md` and lists it in the
/// manifest.
pub fn cmd_report(dir: &Path) -> anyhow::Result<String> {
    let manifest = RunManifest::load(dir)?;
    let mut out = String::from("# Run report\n\n");
    if let Some(c) = &manifest.config {
        let _ = writeln!(
            out,
            "{} qubits, classes {:?}, {} data, backend {}, seed {}, population {}, {} generations.\n",
            c.n_qubits,
            c.classes,
            if c.synthetic { "synthetic" } else { "MNIST" },
            c.backend.as_str(),
            c.seed,
            c.population_size,
            c.generations
        );
    }

    if manifest.lists(art::TRAIN_CSV) {
        let rows = read_records_csv(&manifest.require(dir, art::TRAIN_CSV)?)?;
        out.push_str("## Training generations\n\n");
        generation_grid(&mut out, &rows);
        out.push('\n');
    }

    if manifest.lists(art::POOL_REGULAR) {
        manifest.require(dir, art::POOL_REGULAR)?;
        out.push_str("## Conventionally trained macroCircuit\n\n");
        match manifest.metrics.get("baseline_accuracy") {
            Some(acc) => {
                let _ = writeln!(out, "Full macroCircuit test accuracy: {acc:.3}\n");
            }
            None => out.push_str("Pool written; no accuracy recorded.\n\n"),
        }
    }

    if manifest.lists(art::INFER_CSV) {
        let rows = read_records_csv(&manifest.require(dir, art::INFER_CSV)?)?;
        out.push_str("## Inference generations\n\n");
        generation_grid(&mut out, &rows);
        out.push('\n');
    }

    if manifest.lists(art::RANKED) {
        let ranked: Vec<FitnessRecord> = read_json(&manifest.require(dir, art::RANKED)?)?;
        let selected: Vec<_> = if manifest.lists(art::SELECTION) {
            let sel: Selection = read_json(&manifest.require(dir, art::SELECTION)?)?;
            sel.rows.into_iter().map(|r| r.chromosome).collect()
        } else {
            Vec::new()
        };
        out.push_str("## Final inference population\n\nSelected microCircuits are in bold.\n\n");
        out.push_str("| Chromosome | Accuracy | Resources |\n|---|---|---|\n");
        for r in &ranked {
            let cells = [
                format!("`{}`", r.chromosome),
                format!("{:.3}", r.fitness),
                r.resources.to_string(),
            ];
            let cells: Vec<String> = if selected.contains(&r.chromosome) {
                cells.iter().map(|c| format!("**{c}**")).collect()
            } else {
                cells.to_vec()
            };
            let _ = writeln!(out, "| {} |", cells.join(" | "));
        }
        out.push('\n');
    } else if manifest.lists(art::SELECTION) {
        let sel: Selection = read_json(&manifest.require(dir, art::SELECTION)?)?;
        out.push_str("## Selection\n\n| Rank | Chromosome | Accuracy | Resources |\n|---|---|---|---|\n");
        for r in &sel.rows {
            let _ = writeln!(
                out,
                "| {} | `{}` | {:.3} | {} |",
                r.rank, r.chromosome, r.fitness, r.resources
            );
        }
        out.push('\n');
    }

    if manifest.lists(art::COMPARE_CSV) {
        let rows = read_comparison(&manifest.require(dir, art::COMPARE_CSV)?)?;
        out.push_str("## Backend comparison\n\n");
        out.push_str("| Backend | GA-trained pool | Conventional pool | Delta |\n|---|---|---|---|\n");
        for r in &rows {
            let _ = writeln!(
                out,
                "| {} | {:.3} | {:.3} | {:+.3} |",
                r.backend.as_str(),
                r.ga_best,
                r.regular_best,
                r.delta
            );
        }
        out.push('\n');
    }

    let mut rec = Recorder::new(dir, "report")?;
    rec.text(art::REPORT, &out)?;
    rec.finish(None, 0.0)?;
    Ok(out)
}
