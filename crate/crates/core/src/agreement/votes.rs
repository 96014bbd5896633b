use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Outcome {
    ABetter,
    BBetter,
    Tie,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairwiseVote {
    pub annotator_id: String,
    pub prompt_id: String,
    pub model_a: String,
    pub model_b: String,
    pub outcome: Outcome,
}

const WIN: u64 = 5;
const TIE: u64 = 3;
const LOSS: u64 = 1;

/// Per-model human preference scores on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct HumanScores {
    scores: BTreeMap<String, f64>,
    comparisons: BTreeMap<String, u64>,
}

impl HumanScores {
    pub fn get(&self, model_id: &str) -> Result<f64> {
        self.scores
            .get(model_id)
            .copied()
            .ok_or_else(|| Error::MissingModel(model_id.to_string()))
    }

    pub fn comparisons(&self, model_id: &str) -> u64 {
        self.comparisons.get(model_id).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.scores.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

/// Win/tie/loss votes become 5/3/1 points per comparison; a model's score is
/// its mean points divided by 5.
///
/// Points are accumulated as integers, so the result does not depend on vote
/// order or on how votes are split across annotators.
pub fn aggregate_votes(votes: &[PairwiseVote]) -> Result<HumanScores> {
    if votes.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let mut tally: BTreeMap<&str, (u64, u64)> = BTreeMap::new();
    for v in votes {
        if v.model_a == v.model_b {
            return Err(Error::invalid(
                "pairwise vote",
                format!(
                    "annotator `{}` prompt `{}` compares `{}` with itself",
                    v.annotator_id, v.prompt_id, v.model_a
                ),
            ));
        }
        let (a_pts, b_pts) = match v.outcome {
            Outcome::ABetter => (WIN, LOSS),
            Outcome::BBetter => (LOSS, WIN),
            Outcome::Tie => (TIE, TIE),
        };
        for (model, pts) in [(&v.model_a, a_pts), (&v.model_b, b_pts)] {
            let entry = tally.entry(model).or_default();
            entry.0 += pts;
            entry.1 += 1;
        }
    }
    let mut out = HumanScores::default();
    for (model, (points, n)) in tally {
        out.scores
            .insert(model.to_string(), points as f64 / n as f64 / WIN as f64);
        out.comparisons.insert(model.to_string(), n);
    }
    Ok(out)
}
