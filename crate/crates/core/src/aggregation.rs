//! Penalties, per-sample composition and model-level leaderboards.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Embodiment, EvaluationSample, SampleScore, StabilityGrade, Stratum, TaskCategory};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenaltyConfig {
    /// Motion amplitude below which the soft penalty starts.
    pub t: f64,
    /// Motion amplitude below which the extra `delta` is added.
    pub t_low: f64,
    pub delta: f64,
    /// Penalty per grade, indexed A..E.
    pub grade_penalties: [f64; 5],
    pub w_rss: f64,
    pub w_ms: f64,
}

impl Default for PenaltyConfig {
    fn default() -> Self {
        Self {
            t: 0.1,
            t_low: 0.05,
            delta: 0.1,
            grade_penalties: [0.0, 0.2, 0.4, 0.6, 0.8],
            w_rss: 0.8,
            w_ms: 0.2,
        }
    }
}

impl PenaltyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.t_low && self.t_low < self.t) {
            return Err(Error::Config(format!(
                "need 0 < penalty.t_low < penalty.t, got t_low = {}, t = {}",
                self.t_low, self.t
            )));
        }
        if !(self.delta >= 0.0) {
            return Err(Error::Config(format!(
                "penalty.delta must be non-negative, got {}",
                self.delta
            )));
        }
        let p = &self.grade_penalties;
        if p.iter().any(|v| !(*v >= 0.0 && v.is_finite())) || p.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Config(format!(
                "grade penalties must be non-negative and non-decreasing A→E, got {p:?}"
            )));
        }
        if !(self.w_rss >= 0.0 && self.w_ms >= 0.0) || (self.w_rss + self.w_ms - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "penalty.w_rss + penalty.w_ms must equal 1, got {} + {}",
                self.w_rss, self.w_ms
            )));
        }
        Ok(())
    }

    pub fn grade_penalty(&self, grade: StabilityGrade) -> f64 {
        self.grade_penalties[grade.index()]
    }
}

/// Soft penalty for videos whose subject barely moves.
pub fn motion_penalty(ma: f64, cfg: &PenaltyConfig) -> f64 {
    if ma < cfg.t_low {
        (cfg.t - ma) + cfg.delta
    } else if ma < cfg.t {
        cfg.t - ma
    } else {
        0.0
    }
}

/// Penalty from robot and object stability grades. Object-only grading is
/// treated as ungraded.
pub fn stability_penalty(
    robot: Option<StabilityGrade>,
    object: Option<StabilityGrade>,
    cfg: &PenaltyConfig,
) -> f64 {
    match (robot, object) {
        (Some(r), Some(o)) => (cfg.grade_penalty(r) + cfg.grade_penalty(o)) / 2.0,
        (Some(r), None) => cfg.grade_penalty(r),
        (None, _) => 0.0,
    }
}

/// Stability score used when the judge reports grades but no graded RSS
/// value: one minus the grade penalty.
pub fn stability_from_grades(
    robot: Option<StabilityGrade>,
    object: Option<StabilityGrade>,
    cfg: &PenaltyConfig,
) -> Option<f64> {
    robot.map(|_| (1.0 - stability_penalty(robot, object, cfg)).clamp(0.0, 1.0))
}

pub fn task_completion(pss: f64, tac: f64) -> f64 {
    (pss + tac) / 2.0
}

pub fn visual_quality(
    rss: f64,
    ms: f64,
    ma: f64,
    robot: Option<StabilityGrade>,
    object: Option<StabilityGrade>,
    cfg: &PenaltyConfig,
) -> f64 {
    let raw = cfg.w_rss * rss + cfg.w_ms * ms
        - motion_penalty(ma, cfg)
        - stability_penalty(robot, object, cfg);
    raw.clamp(0.0, 1.0)
}

pub fn sample_total(tc: f64, vq: f64) -> f64 {
    (tc + vq) / 2.0
}

/// Inputs for composing one fully scored video.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleMetrics {
    pub pss: f64,
    pub tac: f64,
    pub rss: f64,
    pub mss: f64,
    pub mas: f64,
    pub robot_grade: Option<StabilityGrade>,
    pub object_grade: Option<StabilityGrade>,
}

pub fn compose_sample(
    sample_id: &str,
    model_id: &str,
    replicate_index: u32,
    m: &SampleMetrics,
    cfg: &PenaltyConfig,
) -> SampleScore {
    let tc = task_completion(m.pss, m.tac);
    let vq = visual_quality(m.rss, m.mss, m.mas, m.robot_grade, m.object_grade, cfg);
    SampleScore {
        sample_id: sample_id.to_string(),
        model_id: model_id.to_string(),
        replicate_index,
        pss: m.pss,
        tac: m.tac,
        rss: m.rss,
        mss: m.mss,
        mas: m.mas,
        tc,
        vq,
        ts: sample_total(tc, vq),
    }
}

/// The nine leaderboard columns, in display order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Indicator {
    Manipulation,
    Spatial,
    MultiEntity,
    LongHorizon,
    Reasoning,
    SingleArm,
    DualArm,
    Quadruped,
    Humanoid,
}

impl Indicator {
    pub const ALL: [Indicator; 9] = [
        Indicator::Manipulation,
        Indicator::Spatial,
        Indicator::MultiEntity,
        Indicator::LongHorizon,
        Indicator::Reasoning,
        Indicator::SingleArm,
        Indicator::DualArm,
        Indicator::Quadruped,
        Indicator::Humanoid,
    ];

    pub const TASKS: [Indicator; 5] = [
        Indicator::Manipulation,
        Indicator::Spatial,
        Indicator::MultiEntity,
        Indicator::LongHorizon,
        Indicator::Reasoning,
    ];

    pub const EMBODIMENTS: [Indicator; 4] = [
        Indicator::SingleArm,
        Indicator::DualArm,
        Indicator::Quadruped,
        Indicator::Humanoid,
    ];

    pub fn column(self) -> &'static str {
        match self {
            Indicator::Manipulation => "manipulation",
            Indicator::Spatial => "spatial",
            Indicator::MultiEntity => "multi_entity",
            Indicator::LongHorizon => "long_horizon",
            Indicator::Reasoning => "reasoning",
            Indicator::SingleArm => "single_arm",
            Indicator::DualArm => "dual_arm",
            Indicator::Quadruped => "quadruped",
            Indicator::Humanoid => "humanoid",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Indicator::Manipulation => "Manipulation",
            Indicator::Spatial => "Spatial",
            Indicator::MultiEntity => "Multi-entity",
            Indicator::LongHorizon => "Long-horizon",
            Indicator::Reasoning => "Reasoning",
            Indicator::SingleArm => "Single arm",
            Indicator::DualArm => "Dual arm",
            Indicator::Quadruped => "Quadruped",
            Indicator::Humanoid => "Humanoid",
        }
    }

    pub fn for_stratum(stratum: Stratum) -> Indicator {
        match stratum.task {
            Some(TaskCategory::CommonManipulation) => Indicator::Manipulation,
            Some(TaskCategory::SpatialRelationship) => Indicator::Spatial,
            Some(TaskCategory::MultiEntityCollaboration) => Indicator::MultiEntity,
            Some(TaskCategory::LongHorizonPlanning) => Indicator::LongHorizon,
            Some(TaskCategory::VisualReasoning) => Indicator::Reasoning,
            None => match stratum.embodiment {
                Embodiment::SingleArm => Indicator::SingleArm,
                Embodiment::DualArm => Indicator::DualArm,
                Embodiment::Quadruped => Indicator::Quadruped,
                Embodiment::Humanoid => Indicator::Humanoid,
            },
        }
    }

    fn position(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Indicator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.column())
    }
}

/// Sample id → stratum lookup built from a manifest.
#[derive(Debug, Clone, Default)]
pub struct SampleStrata(HashMap<String, Stratum>);

impl SampleStrata {
    pub fn from_manifest(samples: &[EvaluationSample]) -> Self {
        Self(
            samples
                .iter()
                .map(|s| (s.sample_id.clone(), s.stratum()))
                .collect(),
        )
    }

    pub fn insert(&mut self, sample_id: impl Into<String>, stratum: Stratum) {
        self.0.insert(sample_id.into(), stratum);
    }

    pub fn get(&self, sample_id: &str) -> Option<Stratum> {
        self.0.get(sample_id).copied()
    }
}

/// Nine indicator values; `None` when the stratum had no samples.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Indicators([Option<f64>; 9]);

impl Indicators {
    pub fn get(&self, ind: Indicator) -> Option<f64> {
        self.0[ind.position()]
    }

    pub fn set(&mut self, ind: Indicator, value: Option<f64>) {
        self.0[ind.position()] = value;
    }

    pub fn iter(&self) -> impl Iterator<Item = (Indicator, Option<f64>)> + '_ {
        Indicator::ALL.iter().map(move |i| (*i, self.get(*i)))
    }

    /// Mean of the present indicators.
    pub fn average(&self) -> Option<f64> {
        let present: Vec<f64> = self.0.iter().flatten().copied().collect();
        if present.is_empty() {
            None
        } else {
            Some(present.iter().sum::<f64>() / present.len() as f64)
        }
    }
}

impl From<[Option<f64>; 9]> for Indicators {
    fn from(v: [Option<f64>; 9]) -> Self {
        Self(v)
    }
}

/// Model-level scores before ranking.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelAggregate {
    pub model_id: String,
    pub indicators: Indicators,
    pub avg: f64,
    /// Mean over samples (after replicate averaging).
    pub tc: f64,
    pub vq: f64,
    pub ts: f64,
    pub samples: usize,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, Default)]
struct Triple {
    tc: f64,
    vq: f64,
    ts: f64,
}

fn mean_triple(items: &[Triple]) -> Triple {
    let n = items.len() as f64;
    let sum = items.iter().fold(Triple::default(), |acc, t| Triple {
        tc: acc.tc + t.tc,
        vq: acc.vq + t.vq,
        ts: acc.ts + t.ts,
    });
    Triple {
        tc: sum.tc / n,
        vq: sum.vq / n,
        ts: sum.ts / n,
    }
}

/// Aggregates one model's scores: replicates of a sample are averaged first,
/// then each indicator is the mean sample TS over its stratum.
pub fn aggregate_model(scores: &[SampleScore], strata: &SampleStrata) -> Result<ModelAggregate> {
    let model_id = match scores.first() {
        Some(s) => s.model_id.clone(),
        None => return Err(Error::InsufficientData { needed: 1, got: 0 }),
    };
    if let Some(other) = scores.iter().find(|s| s.model_id != model_id) {
        return Err(Error::invalid(
            "score set",
            format!("mixes models `{model_id}` and `{}`", other.model_id),
        ));
    }

    // Sorted grouping keeps the floating-point summation order independent
    // of input order.
    let mut by_sample: BTreeMap<&str, Vec<(u32, Triple)>> = BTreeMap::new();
    for s in scores {
        by_sample.entry(&s.sample_id).or_default().push((
            s.replicate_index,
            Triple {
                tc: s.tc,
                vq: s.vq,
                ts: s.ts,
            },
        ));
    }

    let mut per_indicator: BTreeMap<Indicator, Vec<Triple>> = BTreeMap::new();
    let mut all = Vec::with_capacity(by_sample.len());
    for (sample_id, mut reps) in by_sample {
        let stratum = strata
            .get(sample_id)
            .ok_or_else(|| Error::UnknownSample(sample_id.to_string()))?;
        reps.sort_by_key(|(r, _)| *r);
        let triples: Vec<Triple> = reps.into_iter().map(|(_, t)| t).collect();
        let sample = mean_triple(&triples);
        per_indicator
            .entry(Indicator::for_stratum(stratum))
            .or_default()
            .push(sample);
        all.push(sample);
    }

    let mut indicators = Indicators::default();
    let mut warnings = Vec::new();
    for ind in Indicator::ALL {
        match per_indicator.get(&ind) {
            Some(items) => indicators.set(ind, Some(mean_triple(items).ts)),
            None => warnings.push(format!(
                "model `{model_id}`: no samples for indicator {ind}; excluded from avg"
            )),
        }
    }
    let avg = indicators.average().expect("at least one sample was scored");
    let overall = mean_triple(&all);

    Ok(ModelAggregate {
        model_id,
        indicators,
        avg,
        tc: overall.tc,
        vq: overall.vq,
        ts: overall.ts,
        samples: all.len(),
        warnings,
    })
}

/// Groups scores by model and aggregates each model independently.
/// Output is ordered by model id.
pub fn aggregate_models(scores: &[SampleScore], strata: &SampleStrata) -> Result<Vec<ModelAggregate>> {
    let mut by_model: BTreeMap<&str, Vec<SampleScore>> = BTreeMap::new();
    for s in scores {
        by_model.entry(&s.model_id).or_default().push(s.clone());
    }
    let groups: Vec<Vec<SampleScore>> = by_model.into_values().collect();
    groups
        .par_iter()
        .map(|g| aggregate_model(g, strata))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeaderboardEntry {
    pub rank: usize,
    pub model: ModelAggregate,
}

/// Ranks by descending avg; equal averages are ordered by model id.
pub fn rank_models(mut models: Vec<ModelAggregate>) -> Vec<LeaderboardEntry> {
    models.sort_by(|a, b| {
        b.avg
            .total_cmp(&a.avg)
            .then_with(|| a.model_id.cmp(&b.model_id))
    });
    models
        .into_iter()
        .enumerate()
        .map(|(i, model)| LeaderboardEntry { rank: i + 1, model })
        .collect()
}
