//! Manifest parsing and validation.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Embodiment, EvaluationSample, TaskCategory};

/// Expected samples per task category in a complete benchmark.
pub const SAMPLES_PER_TASK: usize = 50;
/// Expected embodiment-split samples per embodiment in a complete benchmark.
pub const SAMPLES_PER_EMBODIMENT: usize = 100;

/// Parses one JSON value per non-blank line. Errors carry the 1-based line
/// number and the path of the offending field.
pub fn parse_jsonl<T: DeserializeOwned>(text: &str) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse_json_line(idx + 1, line)?);
    }
    Ok(out)
}

pub fn parse_json_line<T: DeserializeOwned>(line_no: usize, line: &str) -> Result<T> {
    let mut de = serde_json::Deserializer::from_str(line);
    serde_path_to_error::deserialize(&mut de).map_err(|err| {
        let path = err.path().to_string();
        let inner = err.into_inner();
        let message = inner.to_string();
        // Missing fields are reported against the enclosing object.
        let field = match missing_field_name(&message) {
            Some(name) if path == "." => name.to_string(),
            Some(name) => format!("{path}.{name}"),
            None => path,
        };
        Error::Parse {
            line: line_no,
            field,
            message,
        }
    })
}

fn missing_field_name(message: &str) -> Option<&str> {
    let rest = message.strip_prefix("missing field `")?;
    rest.split('`').next()
}

pub fn parse_manifest(text: &str) -> Result<Vec<EvaluationSample>> {
    parse_jsonl(text)
}

pub fn read_manifest(path: &Path) -> Result<Vec<EvaluationSample>> {
    let text = std::fs::read_to_string(path)?;
    parse_manifest(&text)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    DuplicateId { sample_id: String, occurrences: usize },
    MissingReferenceImage { sample_id: String, path: String },
    EventListMismatch { sample_id: String },
    QuestionChainMismatch { sample_id: String },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Flag {
    ManifestEmpty,
    TaskCount { task: TaskCategory, count: usize, expected: usize },
    EmbodimentCount { embodiment: Embodiment, count: usize, expected: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub total: usize,
    /// Counts over the task-oriented split.
    pub task_counts: BTreeMap<TaskCategory, usize>,
    /// Counts over the embodiment split (samples without a task category).
    pub embodiment_counts: BTreeMap<Embodiment, usize>,
    pub violations: Vec<Violation>,
    pub flags: Vec<Flag>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks manifest invariants. When `image_root` is given, reference images
/// are resolved against it and missing files are reported.
///
/// Count deviations from the 50-per-task / 100-per-embodiment layout are
/// flags, never violations.
pub fn validate_manifest(samples: &[EvaluationSample], image_root: Option<&Path>) -> ValidationReport {
    let mut occurrences: BTreeMap<&str, usize> = BTreeMap::new();
    let mut violations = BTreeSet::new();
    let mut task_counts: BTreeMap<TaskCategory, usize> =
        TaskCategory::ALL.iter().map(|t| (*t, 0)).collect();
    let mut embodiment_counts: BTreeMap<Embodiment, usize> =
        Embodiment::ALL.iter().map(|e| (*e, 0)).collect();

    for s in samples {
        *occurrences.entry(&s.sample_id).or_default() += 1;
        match s.task_category {
            Some(task) => *task_counts.entry(task).or_default() += 1,
            None => *embodiment_counts.entry(s.embodiment).or_default() += 1,
        }

        let long_horizon = s.task_category == Some(TaskCategory::LongHorizonPlanning);
        if long_horizon == s.event_list.is_empty() {
            violations.insert(Violation::EventListMismatch {
                sample_id: s.sample_id.clone(),
            });
        }
        let reasoning = s.task_category == Some(TaskCategory::VisualReasoning);
        if reasoning == s.question_chain.is_empty() {
            violations.insert(Violation::QuestionChainMismatch {
                sample_id: s.sample_id.clone(),
            });
        }
        if let Some(root) = image_root {
            if !root.join(&s.reference_image).is_file() {
                violations.insert(Violation::MissingReferenceImage {
                    sample_id: s.sample_id.clone(),
                    path: s.reference_image.clone(),
                });
            }
        }
    }

    for (id, n) in &occurrences {
        if *n > 1 {
            violations.insert(Violation::DuplicateId {
                sample_id: id.to_string(),
                occurrences: *n,
            });
        }
    }

    let mut flags = Vec::new();
    if samples.is_empty() {
        flags.push(Flag::ManifestEmpty);
    } else {
        for (task, count) in &task_counts {
            if *count != SAMPLES_PER_TASK {
                flags.push(Flag::TaskCount {
                    task: *task,
                    count: *count,
                    expected: SAMPLES_PER_TASK,
                });
            }
        }
        for (embodiment, count) in &embodiment_counts {
            if *count != SAMPLES_PER_EMBODIMENT {
                flags.push(Flag::EmbodimentCount {
                    embodiment: *embodiment,
                    count: *count,
                    expected: SAMPLES_PER_EMBODIMENT,
                });
            }
        }
    }

    ValidationReport {
        total: samples.len(),
        task_counts,
        embodiment_counts,
        violations: violations.into_iter().collect(),
        flags,
    }
}
