//! Turns judge records into normalised metric values.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{normalize_score, NormalizationRange, StabilityGrade, SubMetric, TaskCategory};
use crate::record::VqaRecordSet;

/// Scales a checklist ratio onto the 0–5 judge scale.
fn checklist_score(completed: u32, total: u32, empty: &str) -> Result<f64> {
    if total == 0 {
        return Err(Error::Domain(empty.to_string()));
    }
    if completed > total {
        return Err(Error::Domain(format!(
            "completed {completed} exceeds total {total}"
        )));
    }
    Ok(5.0 * f64::from(completed) / f64::from(total))
}

/// Event Completion Rate on the 0–5 scale.
pub fn event_completion_rate(completed: u32, total: u32) -> Result<f64> {
    checklist_score(completed, total, "empty event list")
}

/// Visual-reasoning score from the answered fraction of the question chain.
pub fn question_chain_score(completed: u32, total: u32) -> Result<f64> {
    checklist_score(completed, total, "empty question chain")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VqaConfig {
    /// Weight of the checklist score (ECR or VRS) when it is combined with
    /// the action-execution score into TAC. The remainder goes to AES.
    pub checklist_weight: f64,
}

impl Default for VqaConfig {
    fn default() -> Self {
        Self {
            checklist_weight: 0.5,
        }
    }
}

impl VqaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.checklist_weight) {
            return Err(Error::Config(format!(
                "vqa.checklist_weight must be in [0, 1], got {}",
                self.checklist_weight
            )));
        }
        Ok(())
    }
}

/// Normalised per-task sub-metrics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaskMetricVector {
    pub task: Option<TaskCategory>,
    pub values: BTreeMap<SubMetric, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VqaScores {
    pub pss: f64,
    pub tac: f64,
    /// Normalised graded stability, when the judge reported one.
    pub rss: Option<f64>,
    pub robot_grade: Option<StabilityGrade>,
    pub object_grade: Option<StabilityGrade>,
    pub task_vector: TaskMetricVector,
}

fn legal_for(task: Option<TaskCategory>) -> &'static [SubMetric] {
    task.map_or(&[], TaskCategory::legal_submetrics)
}

/// Raw TAC on the 0–5 scale. Long-horizon and visual-reasoning tasks replace
/// the judge's direct TAC with a blend of the checklist score and AES when
/// both are available.
fn composed_tac_raw(
    record: &VqaRecordSet,
    task: Option<TaskCategory>,
    cfg: &VqaConfig,
) -> Result<f64> {
    let checklist = match task {
        Some(TaskCategory::LongHorizonPlanning) => match record.events() {
            Some((done, total)) => Some(event_completion_rate(done, total)?),
            None => record
                .task_submetrics
                .get(&SubMetric::Ecr)
                .or_else(|| record.task_submetrics.get(&SubMetric::Ecs))
                .copied(),
        },
        Some(TaskCategory::VisualReasoning) => match record.questions() {
            Some((done, total)) => Some(question_chain_score(done, total)?),
            None => record.task_submetrics.get(&SubMetric::Vrs).copied(),
        },
        _ => return Ok(record.tac_raw),
    };
    let aes = record.task_submetrics.get(&SubMetric::Aes).copied();
    match (checklist, aes) {
        (Some(c), Some(a)) => Ok(cfg.checklist_weight * c + (1.0 - cfg.checklist_weight) * a),
        (None, None) => Ok(record.tac_raw),
        (Some(_), None) => Err(Error::invalid(
            "vqa record",
            format!(
                "{}/{}: checklist score present but AES missing",
                record.sample_id, record.model_id
            ),
        )),
        (None, Some(_)) => Err(Error::invalid(
            "vqa record",
            format!(
                "{}/{}: AES present but checklist score missing",
                record.sample_id, record.model_id
            ),
        )),
    }
}

/// Normalises one judge record for a sample of the given task (None for the
/// embodiment split).
pub fn score_sample_vqa(
    record: &VqaRecordSet,
    task: Option<TaskCategory>,
    cfg: &VqaConfig,
) -> Result<VqaScores> {
    record.validate()?;
    let legal = legal_for(task);
    if let Some(bad) = record.task_submetrics.keys().find(|k| !legal.contains(k)) {
        return Err(Error::IllegalSubMetric {
            metric: bad.to_string(),
            task: task.map_or_else(|| "none (embodiment split)".to_string(), |t| t.to_string()),
        });
    }

    let range = NormalizationRange::JUDGE;
    let pss = normalize_score(record.pss_raw, range)?;
    let tac = normalize_score(composed_tac_raw(record, task, cfg)?, range)?;
    let rss = record
        .rss_raw
        .map(|r| normalize_score(r, range))
        .transpose()?;
    let values = record
        .task_submetrics
        .iter()
        .map(|(k, v)| Ok((*k, normalize_score(*v, range)?)))
        .collect::<Result<_>>()?;

    Ok(VqaScores {
        pss,
        tac,
        rss,
        robot_grade: record.robot_grade,
        object_grade: record.object_grade,
        task_vector: TaskMetricVector { task, values },
    })
}
