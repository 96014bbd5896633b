//! Tunable parameters and flat `key=value` overrides.
//!
//! Recognised keys:
//!
//! | key | meaning |
//! |-----|---------|
//! | `penalty.t`, `penalty.t_low`, `penalty.delta` | motion-amplitude penalty |
//! | `penalty.grade.A` … `penalty.grade.E` | stability grade penalties |
//! | `penalty.w_rss`, `penalty.w_ms` | visual-quality weights |
//! | `motion.clip_ceiling` | per-transition clip for MAS |
//! | `motion.thresholds` | `bound:tau,...`, last bound `inf` |
//! | `vqa.checklist_weight` | checklist share of composed TAC |

use std::collections::BTreeMap;

use crate::aggregation::PenaltyConfig;
use crate::error::{Error, Result};
use crate::model::parse_grade;
use crate::motion::{MotionConfig, ThresholdStep};
use crate::vqa::VqaConfig;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EngineConfig {
    pub penalty: PenaltyConfig,
    pub motion: MotionConfig,
    pub vqa: VqaConfig,
}

/// Splits `key=value`, trimming both sides.
pub fn parse_override(text: &str) -> Result<(String, String)> {
    let (k, v) = text
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override `{text}` is not key=value")))?;
    let (k, v) = (k.trim(), v.trim());
    if k.is_empty() {
        return Err(Error::Config(format!("override `{text}` has an empty key")));
    }
    Ok((k.to_string(), v.to_string()))
}

fn number(key: &str, value: &str) -> Result<f64> {
    let v: f64 = value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: `{value}` is not a number")))?;
    if v.is_nan() {
        return Err(Error::Config(format!("{key}: NaN is not allowed")));
    }
    Ok(v)
}

fn threshold_table(key: &str, value: &str) -> Result<Vec<ThresholdStep>> {
    value
        .split(',')
        .map(|step| {
            let (bound, tau) = step
                .split_once(':')
                .ok_or_else(|| Error::Config(format!("{key}: step `{step}` is not bound:tau")))?;
            Ok(ThresholdStep {
                upper_bound: number(key, bound.trim())?,
                tau: number(key, tau.trim())?,
            })
        })
        .collect()
}

impl EngineConfig {
    /// Applies overrides on top of the defaults and validates the result.
    pub fn with_overrides(overrides: &BTreeMap<String, String>) -> Result<Self> {
        let mut cfg = EngineConfig::default();
        for (key, value) in overrides {
            cfg.apply(key, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "penalty.t" => self.penalty.t = number(key, value)?,
            "penalty.t_low" => self.penalty.t_low = number(key, value)?,
            "penalty.delta" => self.penalty.delta = number(key, value)?,
            "penalty.w_rss" => self.penalty.w_rss = number(key, value)?,
            "penalty.w_ms" => self.penalty.w_ms = number(key, value)?,
            "motion.clip_ceiling" => self.motion.clip_ceiling = number(key, value)?,
            "motion.thresholds" => self.motion.threshold_table = threshold_table(key, value)?,
            "vqa.checklist_weight" => self.vqa.checklist_weight = number(key, value)?,
            _ => match key.strip_prefix("penalty.grade.") {
                Some(g) => {
                    let grade = parse_grade(g)
                        .map_err(|_| Error::Config(format!("unknown grade in key `{key}`")))?;
                    self.penalty.grade_penalties[grade.index()] = number(key, value)?;
                }
                None => return Err(Error::Config(format!("unknown config key `{key}`"))),
            },
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.penalty.validate()?;
        self.motion.validate()?;
        self.vqa.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn overrides(pairs: &[&str]) -> BTreeMap<String, String> {
        pairs.iter().map(|p| parse_override(p).unwrap()).collect()
    }

    #[test]
    fn defaults_validate() {
        let cfg = EngineConfig::with_overrides(&BTreeMap::new()).unwrap();
        assert_eq!(cfg, EngineConfig::default());
    }

    #[test]
    fn applies_overrides() {
        let cfg = EngineConfig::with_overrides(&overrides(&[
            "penalty.t=0.2",
            "penalty.grade.c = 0.5",
            "motion.thresholds=0.2:0.02,inf:0.04",
            "vqa.checklist_weight=0.25",
        ]))
        .unwrap();
        assert_eq!(cfg.penalty.t, 0.2);
        assert_eq!(cfg.penalty.grade_penalties[2], 0.5);
        assert_eq!(cfg.motion.threshold_table.len(), 2);
        assert_eq!(cfg.motion.threshold_table[1].upper_bound, f64::INFINITY);
        assert_eq!(cfg.vqa.checklist_weight, 0.25);
    }

    #[test]
    fn rejects_bad_overrides() {
        assert!(parse_override("penalty.t").is_err());
        assert!(parse_override("=1").is_err());
        for bad in [
            &["penalty.t=abc"][..],
            &["penalty.unknown=1"],
            &["penalty.grade.F=0.1"],
            &["penalty.t_low=0.3"],
            &["penalty.w_rss=0.7"],
            &["motion.thresholds=0.3:0.01,0.1:0.02,inf:0.03"],
            &["motion.thresholds=0.3"],
            &["vqa.checklist_weight=1.5"],
        ] {
            assert!(
                EngineConfig::with_overrides(&overrides(bad)).is_err(),
                "{bad:?} should fail"
            );
        }
        // weights may be moved together
        EngineConfig::with_overrides(&overrides(&["penalty.w_rss=0.7", "penalty.w_ms=0.3"])).unwrap();
    }
}
