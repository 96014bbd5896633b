//! Judge output records, one per generated video.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifest::parse_jsonl;
use crate::model::{StabilityGrade, SubMetric};

/// Raw judge outputs for one (sample, model, replicate). Raw scores are on the 0–5 scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqaRecordSet {
    pub sample_id: String,
    pub model_id: String,
    pub replicate_index: u32,
    pub pss_raw: f64,
    pub tac_raw: f64,
    /// Graded stability score on the 0–5 scale. When absent the stability
    /// score is derived from the grades.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rss_raw: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub robot_grade: Option<StabilityGrade>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub object_grade: Option<StabilityGrade>,
    #[serde(default)]
    pub task_submetrics: BTreeMap<SubMetric, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub events_completed: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub events_total: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub questions_completed: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub questions_total: Option<u32>,
    /// Opaque judge identity; never affects scoring.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub judge: Option<String>,
}

fn check_raw(name: &str, v: f64) -> Result<()> {
    if !(0.0..=5.0).contains(&v) {
        return Err(Error::invalid(
            "vqa record",
            format!("{name} = {v} outside [0, 5]"),
        ));
    }
    Ok(())
}

fn check_checklist(name: &str, done: Option<u32>, total: Option<u32>) -> Result<()> {
    match (done, total) {
        (None, None) => Ok(()),
        (Some(d), Some(t)) if d <= t => Ok(()),
        (Some(d), Some(t)) => Err(Error::invalid(
            "vqa record",
            format!("{name}: completed {d} exceeds total {t}"),
        )),
        _ => Err(Error::invalid(
            "vqa record",
            format!("{name}: completed and total must be given together"),
        )),
    }
}

impl VqaRecordSet {
    pub fn validate(&self) -> Result<()> {
        check_raw("pss_raw", self.pss_raw)?;
        check_raw("tac_raw", self.tac_raw)?;
        if let Some(r) = self.rss_raw {
            check_raw("rss_raw", r)?;
        }
        for (k, v) in &self.task_submetrics {
            check_raw(k.as_str(), *v)?;
        }
        if self.object_grade.is_some() && self.robot_grade.is_none() {
            return Err(Error::invalid(
                "vqa record",
                "object grade given without a robot grade",
            ));
        }
        check_checklist("events", self.events_completed, self.events_total)?;
        check_checklist("questions", self.questions_completed, self.questions_total)?;
        Ok(())
    }

    pub fn events(&self) -> Option<(u32, u32)> {
        self.events_completed.zip(self.events_total)
    }

    pub fn questions(&self) -> Option<(u32, u32)> {
        self.questions_completed.zip(self.questions_total)
    }
}

pub fn parse_records(text: &str) -> Result<Vec<VqaRecordSet>> {
    parse_jsonl(text)
}

pub fn read_records(path: &Path) -> Result<Vec<VqaRecordSet>> {
    parse_records(&std::fs::read_to_string(path)?)
}
