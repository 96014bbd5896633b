//! Motion Amplitude Score (MAS) and Motion Smoothness Score (MSS).
//!
//! MAS is the mean, over frame transitions, of the diagonal-normalised subject
//! displacement after camera-motion compensation against background tracks.
//! MSS is the share of frames not flagged by an adaptive-threshold detector
//! run over the per-frame quality sequence; the threshold depends on MAS.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signals::{PointTracks, SignalBundle};

/// One row of the adaptive threshold table: motion values strictly below
/// `upper_bound` use `tau`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdStep {
    pub upper_bound: f64,
    pub tau: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotionConfig {
    pub clip_ceiling: f64,
    pub threshold_table: Vec<ThresholdStep>,
}

impl Default for MotionConfig {
    fn default() -> Self {
        let step = |upper_bound, tau| ThresholdStep { upper_bound, tau };
        Self {
            clip_ceiling: 1.0,
            threshold_table: vec![
                step(0.1, 0.01),
                step(0.3, 0.015),
                step(0.5, 0.025),
                step(f64::INFINITY, 0.03),
            ],
        }
    }
}

impl MotionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.clip_ceiling > 0.0) {
            return Err(Error::Config(format!(
                "motion.clip_ceiling must be positive, got {}",
                self.clip_ceiling
            )));
        }
        let table = &self.threshold_table;
        if table.is_empty() {
            return Err(Error::Config("motion threshold table is empty".into()));
        }
        if table.last().map(|s| s.upper_bound) != Some(f64::INFINITY) {
            return Err(Error::Config(
                "last motion threshold bound must be inf".into(),
            ));
        }
        for pair in table.windows(2) {
            if !(pair[0].upper_bound < pair[1].upper_bound) {
                return Err(Error::Config(
                    "motion threshold bounds must be strictly increasing".into(),
                ));
            }
        }
        if let Some(s) = table.iter().find(|s| !(s.tau > 0.0 && s.tau.is_finite())) {
            return Err(Error::Config(format!(
                "motion threshold tau must be positive, got {}",
                s.tau
            )));
        }
        Ok(())
    }
}

fn displacement(tracks: &PointTracks, frame: usize) -> (f64, usize) {
    let mut sum = 0.0;
    let mut visible = 0;
    for k in 0..tracks.point_count() {
        if tracks.is_visible(frame - 1, k) && tracks.is_visible(frame, k) {
            let [x0, y0] = tracks.position(frame - 1, k);
            let [x1, y1] = tracks.position(frame, k);
            sum += (x1 - x0).hypot(y1 - y0);
            visible += 1;
        }
    }
    if visible == 0 {
        (0.0, 0)
    } else {
        (sum / visible as f64, visible)
    }
}

/// Mean pixel displacement of the points visible in both `frame - 1` and
/// `frame` (0-based, so `frame` ranges over `1..frame_count`).
///
/// Returns 0 when no point is visible across the transition.
pub fn mean_displacement(tracks: &PointTracks, frame: usize) -> Result<f64> {
    let frames = tracks.frame_count();
    if frame == 0 || frame >= frames {
        return Err(Error::FrameIndex {
            index: frame,
            max: frames.saturating_sub(1),
        });
    }
    Ok(displacement(tracks, frame).0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransitionMotion {
    /// Diagonal-normalised subject displacement.
    pub subject: f64,
    /// Diagonal-normalised background displacement.
    pub background: f64,
    /// Subject motion after soft-zero compensation (before clipping).
    pub compensated: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmplitudeBreakdown {
    pub score: f64,
    pub transitions: Vec<TransitionMotion>,
    /// Transitions (index of the later frame) with no subject point visible in both frames.
    pub occluded: Vec<usize>,
}

/// Soft-zero compensation: background motion is removed only when the
/// subject moves more than the background.
pub fn soft_zero(subject: f64, background: f64) -> f64 {
    if subject > background {
        subject - background
    } else {
        subject
    }
}

pub fn motion_amplitude_breakdown(
    bundle: &SignalBundle,
    cfg: &MotionConfig,
) -> Result<AmplitudeBreakdown> {
    bundle.validate()?;
    let diag = bundle.diagonal();
    let frames = bundle.frame_count();
    let mut transitions = Vec::with_capacity(frames - 1);
    let mut occluded = Vec::new();
    let mut total = 0.0;
    for frame in 1..frames {
        let (subj, seen) = displacement(&bundle.subject_tracks, frame);
        if seen == 0 {
            occluded.push(frame);
        }
        let (bg, _) = displacement(&bundle.background_tracks, frame);
        let subject = subj / diag;
        let background = bg / diag;
        let compensated = soft_zero(subject, background);
        total += compensated.min(cfg.clip_ceiling);
        transitions.push(TransitionMotion {
            subject,
            background,
            compensated,
        });
    }
    let score = (total / transitions.len() as f64).clamp(0.0, 1.0);
    Ok(AmplitudeBreakdown {
        score,
        transitions,
        occluded,
    })
}

pub fn motion_amplitude(bundle: &SignalBundle, cfg: &MotionConfig) -> Result<f64> {
    motion_amplitude_breakdown(bundle, cfg).map(|b| b.score)
}

/// Anomaly threshold for a video whose motion amplitude is `m`.
pub fn adaptive_threshold(m: f64, cfg: &MotionConfig) -> f64 {
    cfg.threshold_table
        .iter()
        .find(|s| m < s.upper_bound)
        .or(cfg.threshold_table.last())
        .map(|s| s.tau)
        .expect("threshold table is non-empty")
}

/// Fraction of frames not involved in an abnormal quality jump.
///
/// A transition is abnormal when `|Q_t - Q_{t-1}|` exceeds the adaptive
/// threshold; its neighbouring transitions are flagged too. Flags are counted
/// once each and divided by the frame count.
pub fn motion_smoothness(quality: &[f64], m: f64, cfg: &MotionConfig) -> Result<f64> {
    let frames = quality.len();
    if frames < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: frames,
        });
    }
    if let Some(q) = quality.iter().find(|q| !(0.0..=1.0).contains(*q)) {
        return Err(Error::Domain(format!("quality score {q} outside [0, 1]")));
    }
    if !(0.0..=1.0).contains(&m) {
        return Err(Error::Domain(format!("motion amplitude {m} outside [0, 1]")));
    }
    let tau = adaptive_threshold(m, cfg);

    // Transition t compares frames t-1 and t (0-based t in 1..frames).
    let mut flagged = BTreeSet::new();
    for t in 1..frames {
        if (quality[t] - quality[t - 1]).abs() > tau {
            flagged.insert(t);
            if t > 1 {
                flagged.insert(t - 1);
            }
            if t + 1 < frames {
                flagged.insert(t + 1);
            }
        }
    }
    Ok(1.0 - flagged.len() as f64 / frames as f64)
}
