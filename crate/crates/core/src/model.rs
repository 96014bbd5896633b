//! Core benchmark vocabulary: samples, categories, grades and per-sample scores.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Task dimension of the task-oriented split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TaskCategory {
    CommonManipulation,
    LongHorizonPlanning,
    MultiEntityCollaboration,
    SpatialRelationship,
    VisualReasoning,
}

impl TaskCategory {
    pub const ALL: [TaskCategory; 5] = [
        TaskCategory::CommonManipulation,
        TaskCategory::LongHorizonPlanning,
        TaskCategory::MultiEntityCollaboration,
        TaskCategory::SpatialRelationship,
        TaskCategory::VisualReasoning,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TaskCategory::CommonManipulation => "CommonManipulation",
            TaskCategory::LongHorizonPlanning => "LongHorizonPlanning",
            TaskCategory::MultiEntityCollaboration => "MultiEntityCollaboration",
            TaskCategory::SpatialRelationship => "SpatialRelationship",
            TaskCategory::VisualReasoning => "VisualReasoning",
        }
    }

    /// Sub-metrics the judge may report for this task.
    pub fn legal_submetrics(self) -> &'static [SubMetric] {
        use SubMetric::*;
        match self {
            TaskCategory::CommonManipulation => &[Aes, Tcs, Ocs, Rcs, Pss],
            // Some judge exports label the event score ECS instead of ECR.
            TaskCategory::LongHorizonPlanning => &[Aes, Ecr, Ecs, Ocs, Rcs, Pss],
            TaskCategory::MultiEntityCollaboration => &[Acs, Tcs, Ecs, Ocs, Pss],
            TaskCategory::SpatialRelationship => &[Srs, Mfs, Ocs, Rcs, Pss],
            TaskCategory::VisualReasoning => &[Aes, Vrs, Ocs, Rcs, Pss],
        }
    }
}

impl fmt::Display for TaskCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Embodiment {
    SingleArm,
    DualArm,
    Humanoid,
    Quadruped,
}

impl Embodiment {
    pub const ALL: [Embodiment; 4] = [
        Embodiment::SingleArm,
        Embodiment::DualArm,
        Embodiment::Humanoid,
        Embodiment::Quadruped,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Embodiment::SingleArm => "SingleArm",
            Embodiment::DualArm => "DualArm",
            Embodiment::Humanoid => "Humanoid",
            Embodiment::Quadruped => "Quadruped",
        }
    }
}

impl fmt::Display for Embodiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Viewpoint {
    FirstPerson,
    ThirdPerson,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SampleMetadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manipulated_object: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub viewpoint: Option<Viewpoint>,
}

/// One manifest entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationSample {
    pub sample_id: String,
    /// Present for the task-oriented split, absent for the embodiment split.
    #[serde(default)]
    pub task_category: Option<TaskCategory>,
    pub embodiment: Embodiment,
    pub prompt: String,
    /// Opaque path, resolved relative to the manifest directory.
    pub reference_image: String,
    #[serde(default)]
    pub metadata: SampleMetadata,
    #[serde(default)]
    pub event_list: Vec<String>,
    #[serde(default)]
    pub question_chain: Vec<String>,
}

impl EvaluationSample {
    pub fn stratum(&self) -> Stratum {
        Stratum {
            task: self.task_category,
            embodiment: self.embodiment,
        }
    }
}

/// Where a sample lands in the leaderboard: task-split samples feed task
/// indicators, the rest feed embodiment indicators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Stratum {
    pub task: Option<TaskCategory>,
    pub embodiment: Embodiment,
}

/// Five-level robot/object stability grade; A is the most stable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StabilityGrade {
    A,
    B,
    C,
    D,
    E,
}

impl StabilityGrade {
    pub const ALL: [StabilityGrade; 5] = [
        StabilityGrade::A,
        StabilityGrade::B,
        StabilityGrade::C,
        StabilityGrade::D,
        StabilityGrade::E,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StabilityGrade::A => "A",
            StabilityGrade::B => "B",
            StabilityGrade::C => "C",
            StabilityGrade::D => "D",
            StabilityGrade::E => "E",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Parses a judge-emitted grade token. Surrounding whitespace and case are ignored.
pub fn parse_grade(token: &str) -> Result<StabilityGrade> {
    match token.trim().to_ascii_uppercase().as_str() {
        "A" => Ok(StabilityGrade::A),
        "B" => Ok(StabilityGrade::B),
        "C" => Ok(StabilityGrade::C),
        "D" => Ok(StabilityGrade::D),
        "E" => Ok(StabilityGrade::E),
        _ => Err(Error::GradeParse(token.to_string())),
    }
}

impl FromStr for StabilityGrade {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_grade(s)
    }
}

impl fmt::Display for StabilityGrade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for StabilityGrade {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for StabilityGrade {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let token = String::deserialize(deserializer)?;
        parse_grade(&token).map_err(serde::de::Error::custom)
    }
}

/// Task-level sub-metric vocabulary reported by the judges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SubMetric {
    /// Action execution
    Aes,
    /// Task completion
    Tcs,
    /// Object consistency
    Ocs,
    /// Robot consistency
    Rcs,
    /// Physical-semantic plausibility
    Pss,
    /// Event completion ratio
    Ecr,
    /// Entity consistency
    Ecs,
    /// Action coordination
    Acs,
    /// Spatial relation
    Srs,
    /// Manipulation feasibility
    Mfs,
    /// Visual reasoning
    Vrs,
}

impl SubMetric {
    pub fn as_str(self) -> &'static str {
        match self {
            SubMetric::Aes => "AES",
            SubMetric::Tcs => "TCS",
            SubMetric::Ocs => "OCS",
            SubMetric::Rcs => "RCS",
            SubMetric::Pss => "PSS",
            SubMetric::Ecr => "ECR",
            SubMetric::Ecs => "ECS",
            SubMetric::Acs => "ACS",
            SubMetric::Srs => "SRS",
            SubMetric::Mfs => "MFS",
            SubMetric::Vrs => "VRS",
        }
    }
}

impl fmt::Display for SubMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Fully scored video. Every metric lives in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleScore {
    pub sample_id: String,
    pub model_id: String,
    pub replicate_index: u32,
    pub pss: f64,
    pub tac: f64,
    pub rss: f64,
    pub mss: f64,
    pub mas: f64,
    pub tc: f64,
    pub vq: f64,
    pub ts: f64,
}

/// Raw score range used for min-max normalisation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationRange {
    min: f64,
    max: f64,
}

impl NormalizationRange {
    /// The 0–5 scale every judge sub-score is reported on.
    pub const JUDGE: NormalizationRange = NormalizationRange { min: 0.0, max: 5.0 };

    pub fn new(min: f64, max: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) || max <= min {
            return Err(Error::invalid(
                "normalization range",
                format!("need finite s_min < s_max, got [{min}, {max}]"),
            ));
        }
        Ok(Self { min, max })
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }
}

/// Min-max normalises `s` into `[0, 1]`, clipping values outside the range.
pub fn normalize_score(s: f64, range: NormalizationRange) -> Result<f64> {
    if !s.is_finite() {
        return Err(Error::Domain(format!("cannot normalise non-finite score {s}")));
    }
    Ok(((s - range.min) / (range.max - range.min)).clamp(0.0, 1.0))
}
