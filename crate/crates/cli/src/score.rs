use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};

use anyhow::anyhow;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use rbench_core::aggregation::{sample_total, stability_from_grades, task_completion, visual_quality};
use rbench_core::config::EngineConfig;
use rbench_core::manifest::{parse_json_line, parse_manifest};
use rbench_core::model::{Embodiment, EvaluationSample, SampleScore, TaskCategory};
use rbench_core::motion::{motion_amplitude_breakdown, motion_smoothness};
use rbench_core::record::{parse_records, VqaRecordSet};
use rbench_core::signals::SignalBundle;
use rbench_core::vqa::score_sample_vqa;

use crate::{read_text, write_text, CliError, CliResult, RunMeta, ScoreArgs};

/// One line of the results file. Metrics are `null` when their inputs were
/// missing or invalid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub sample_id: String,
    pub model_id: String,
    pub replicate_index: u32,
    pub task_category: Option<TaskCategory>,
    pub embodiment: Embodiment,
    pub pss: Option<f64>,
    pub tac: Option<f64>,
    pub rss: Option<f64>,
    pub mss: Option<f64>,
    pub mas: Option<f64>,
    pub tc: Option<f64>,
    pub vq: Option<f64>,
    pub ts: Option<f64>,
}

impl ScoreRow {
    /// The fully scored form, when every metric is present.
    pub fn complete(&self) -> Option<SampleScore> {
        Some(SampleScore {
            sample_id: self.sample_id.clone(),
            model_id: self.model_id.clone(),
            replicate_index: self.replicate_index,
            pss: self.pss?,
            tac: self.tac?,
            rss: self.rss?,
            mss: self.mss?,
            mas: self.mas?,
            tc: self.tc?,
            vq: self.vq?,
            ts: self.ts?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkipEntry {
    pub model_id: String,
    pub sample_id: String,
    pub replicate_index: u32,
    pub reason: String,
}

/// (model_id, sample_id, replicate_index): the results sort order.
type Key = (String, String, u32);

fn sorted_files(dir: &Path, ext: &str) -> CliResult<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir)
        .map_err(|e| CliError::io(anyhow!("cannot read directory {}: {e}", dir.display())))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(CliError::io)?.path();
        if path.is_file() && path.extension().is_some_and(|x| x == ext) {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

pub fn load_signals(dir: &Path) -> CliResult<BTreeMap<Key, SignalBundle>> {
    let mut out = BTreeMap::new();
    for path in sorted_files(dir, "json")? {
        let text = read_text(&path)?;
        let bundle: SignalBundle = parse_json_line(1, &text)
            .map_err(|e| CliError::domain(anyhow!("{}: {e}", path.display())))?;
        let key = (
            bundle.model_id.clone(),
            bundle.sample_id.clone(),
            bundle.replicate_index,
        );
        if out.insert(key.clone(), bundle).is_some() {
            return Err(CliError::domain(anyhow!(
                "{}: duplicate signal bundle for {}/{}/{}",
                path.display(),
                key.0,
                key.1,
                key.2
            )));
        }
    }
    Ok(out)
}

pub fn load_records(dir: &Path) -> CliResult<BTreeMap<Key, VqaRecordSet>> {
    let mut out = BTreeMap::new();
    for path in sorted_files(dir, "jsonl")? {
        let text = read_text(&path)?;
        let records = parse_records(&text)
            .map_err(|e| CliError::domain(anyhow!("{}: {e}", path.display())))?;
        for r in records {
            let key = (r.model_id.clone(), r.sample_id.clone(), r.replicate_index);
            if out.insert(key.clone(), r).is_some() {
                return Err(CliError::domain(anyhow!(
                    "{}: duplicate judge record for {}/{}/{}",
                    path.display(),
                    key.0,
                    key.1,
                    key.2
                )));
            }
        }
    }
    Ok(out)
}

struct Outcome {
    row: Option<ScoreRow>,
    skip: Option<SkipEntry>,
    warning: Option<String>,
}

fn score_one(
    key: &Key,
    sample: Option<&EvaluationSample>,
    signals: Option<&SignalBundle>,
    record: Option<&VqaRecordSet>,
    cfg: &EngineConfig,
) -> Outcome {
    let (model_id, sample_id, replicate_index) = key.clone();
    let skip = |reason: String| SkipEntry {
        model_id: model_id.clone(),
        sample_id: sample_id.clone(),
        replicate_index,
        reason,
    };
    let Some(sample) = sample else {
        return Outcome {
            row: None,
            skip: Some(skip("sample not in manifest".into())),
            warning: None,
        };
    };

    let mut reasons = Vec::new();
    let (mut mas, mut mss, mut warning) = (None, None, None);
    match signals {
        None => reasons.push("signal bundle missing".to_string()),
        Some(bundle) => match motion_amplitude_breakdown(bundle, &cfg.motion) {
            Err(e) => reasons.push(format!("signals: {e}")),
            Ok(amp) => {
                if !amp.occluded.is_empty() {
                    warning = Some(format!(
                        "{model_id}/{sample_id}/{replicate_index}: no visible subject points at transitions {:?}",
                        amp.occluded
                    ));
                }
                mas = Some(amp.score);
                match motion_smoothness(&bundle.quality_scores, amp.score, &cfg.motion) {
                    Ok(s) => mss = Some(s),
                    Err(e) => reasons.push(format!("signals: {e}")),
                }
            }
        },
    }

    let (mut pss, mut tac, mut rss, mut grades) = (None, None, None, None);
    match record {
        None => reasons.push("judge record missing".to_string()),
        Some(r) => match score_sample_vqa(r, sample.task_category, &cfg.vqa) {
            Err(e) => reasons.push(format!("judge record: {e}")),
            Ok(v) => {
                pss = Some(v.pss);
                tac = Some(v.tac);
                rss = v
                    .rss
                    .or_else(|| stability_from_grades(v.robot_grade, v.object_grade, &cfg.penalty));
                if rss.is_none() {
                    reasons.push("judge record: no stability score or grades".to_string());
                }
                grades = Some((v.robot_grade, v.object_grade));
            }
        },
    }

    let tc = pss.zip(tac).map(|(p, t)| task_completion(p, t));
    let vq = match (rss, mss, mas, grades) {
        (Some(r), Some(s), Some(a), Some((g_r, g_o))) => {
            Some(visual_quality(r, s, a, g_r, g_o, &cfg.penalty))
        }
        _ => None,
    };
    let ts = tc.zip(vq).map(|(c, v)| sample_total(c, v));

    let row = ScoreRow {
        sample_id: sample_id.clone(),
        model_id: model_id.clone(),
        replicate_index,
        task_category: sample.task_category,
        embodiment: sample.embodiment,
        pss,
        tac,
        rss,
        mss,
        mas,
        tc,
        vq,
        ts,
    };
    Outcome {
        row: Some(row),
        skip: (!reasons.is_empty()).then(|| skip(reasons.join("; "))),
        warning,
    }
}

/// Scores every (model, sample, replicate) that has signals or a judge
/// record. Rows come back in key order regardless of thread count.
pub fn score_all(
    samples: &[EvaluationSample],
    signals: &BTreeMap<Key, SignalBundle>,
    records: &BTreeMap<Key, VqaRecordSet>,
    cfg: &EngineConfig,
) -> (Vec<ScoreRow>, Vec<SkipEntry>) {
    let index: HashMap<&str, &EvaluationSample> =
        samples.iter().map(|s| (s.sample_id.as_str(), s)).collect();
    let keys: Vec<&Key> = signals
        .keys()
        .chain(records.keys())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let outcomes: Vec<Outcome> = keys
        .par_iter()
        .map(|key| {
            score_one(
                key,
                index.get(key.1.as_str()).copied(),
                signals.get(*key),
                records.get(*key),
                cfg,
            )
        })
        .collect();
    let mut rows = Vec::new();
    let mut skips = Vec::new();
    for o in outcomes {
        if let Some(w) = o.warning {
            eprintln!("warning: {w}");
        }
        rows.extend(o.row);
        skips.extend(o.skip);
    }
    (rows, skips)
}

pub fn render_results(meta: &RunMeta, rows: &[ScoreRow]) -> String {
    let mut out = format!("{{\"run\":{}}}\n", meta.header_line());
    for row in rows {
        out.push_str(&serde_json::to_string(row).expect("rows serialize"));
        out.push('\n');
    }
    out
}

/// Parses a results file, skipping the run header.
pub fn parse_results(text: &str) -> CliResult<Vec<ScoreRow>> {
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        if idx == 0 && line.starts_with("{\"run\":") {
            continue;
        }
        let row: ScoreRow = parse_json_line(idx + 1, line).map_err(CliError::domain)?;
        rows.push(row);
    }
    Ok(rows)
}

pub fn run(args: &ScoreArgs, cfg: &EngineConfig, meta: &RunMeta) -> CliResult<String> {
    let manifest_text = read_text(&args.manifest)?;
    let samples = parse_manifest(&manifest_text)
        .map_err(|e| CliError::domain(anyhow!("{}: {e}", args.manifest.display())))?;
    let mut seen = BTreeSet::new();
    if let Some(dup) = samples.iter().find(|s| !seen.insert(s.sample_id.as_str())) {
        return Err(CliError::domain(anyhow!(
            "manifest has duplicate sample_id `{}`",
            dup.sample_id
        )));
    }
    let signals = load_signals(&args.signals_dir)?;
    let records = load_records(&args.vqa_dir)?;

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = args.jobs {
        pool = pool.num_threads(usize::from(jobs));
    }
    let pool = pool.build().map_err(CliError::io)?;
    let (rows, skips) = pool.install(|| score_all(&samples, &signals, &records, cfg));

    let complete = rows.iter().filter(|r| r.ts.is_some()).count();
    for s in &skips {
        eprintln!(
            "skipped: {}/{}/{}: {}",
            s.model_id, s.sample_id, s.replicate_index, s.reason
        );
    }
    if let Some(path) = &args.skips {
        let text: String = skips
            .iter()
            .map(|s| serde_json::to_string(s).expect("skip entries serialize") + "\n")
            .collect();
        write_text(path, &text)?;
    }
    if complete == 0 {
        return Err(CliError::domain(anyhow!(
            "no scorable (model, sample, replicate) triples: {} skipped",
            skips.len()
        )));
    }
    write_text(&args.out, &render_results(meta, &rows))?;
    Ok(format!(
        "scored {complete} of {} rows ({} skipped) -> {}\n",
        rows.len(),
        skips.len(),
        args.out.display()
    ))
}
