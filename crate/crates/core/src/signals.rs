//! Per-video extracted signals: point tracks and per-frame quality scores.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Point tracks stored frame-major: `points[frame][point] = [x, y]` in pixels.
///
/// `visibility` has the same `[frame][point]` shape; when omitted every point
/// is treated as visible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointTracks {
    pub points: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub visibility: Option<Vec<Vec<bool>>>,
}

impl PointTracks {
    pub fn new(points: Vec<Vec<[f64; 2]>>) -> Self {
        Self {
            points,
            visibility: None,
        }
    }

    pub fn with_visibility(points: Vec<Vec<[f64; 2]>>, visibility: Vec<Vec<bool>>) -> Self {
        Self {
            points,
            visibility: Some(visibility),
        }
    }

    pub fn frame_count(&self) -> usize {
        self.points.len()
    }

    /// Points per frame (zero for an empty track set).
    pub fn point_count(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }

    pub fn position(&self, frame: usize, point: usize) -> [f64; 2] {
        self.points[frame][point]
    }

    pub fn is_visible(&self, frame: usize, point: usize) -> bool {
        self.visibility
            .as_ref()
            .map_or(true, |v| v[frame][point])
    }

    fn validate(&self, label: &str) -> Result<()> {
        let k = self.point_count();
        for (f, frame) in self.points.iter().enumerate() {
            if frame.len() != k {
                return Err(Error::invalid(
                    "signal bundle",
                    format!("{label} frame {f} has {} points, expected {k}", frame.len()),
                ));
            }
            if let Some(bad) = frame.iter().position(|p| !(p[0].is_finite() && p[1].is_finite())) {
                return Err(Error::invalid(
                    "signal bundle",
                    format!("{label} frame {f} point {bad} has a non-finite coordinate"),
                ));
            }
        }
        if let Some(vis) = &self.visibility {
            if vis.len() != self.points.len() || vis.iter().any(|row| row.len() != k) {
                return Err(Error::invalid(
                    "signal bundle",
                    format!("{label} visibility shape does not match points"),
                ));
            }
        }
        Ok(())
    }
}

/// Signals extracted from one generated video.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalBundle {
    pub sample_id: String,
    pub model_id: String,
    pub replicate_index: u32,
    pub frame_width: f64,
    pub frame_height: f64,
    pub subject_tracks: PointTracks,
    pub background_tracks: PointTracks,
    pub quality_scores: Vec<f64>,
}

impl SignalBundle {
    pub fn frame_count(&self) -> usize {
        self.subject_tracks.frame_count()
    }

    pub fn diagonal(&self) -> f64 {
        self.frame_width.hypot(self.frame_height)
    }

    pub fn validate(&self) -> Result<()> {
        let dims_ok = self.frame_width.is_finite()
            && self.frame_height.is_finite()
            && self.frame_width > 0.0
            && self.frame_height > 0.0;
        if !dims_ok {
            return Err(Error::invalid(
                "signal bundle",
                format!(
                    "frame size must be positive, got {}x{}",
                    self.frame_width, self.frame_height
                ),
            ));
        }
        let frames = self.subject_tracks.frame_count();
        if frames < 2 {
            return Err(Error::invalid(
                "signal bundle",
                format!("need at least 2 frames of tracks, got {frames}"),
            ));
        }
        if self.background_tracks.frame_count() != frames {
            return Err(Error::invalid(
                "signal bundle",
                format!(
                    "subject tracks have {frames} frames but background tracks have {}",
                    self.background_tracks.frame_count()
                ),
            ));
        }
        self.subject_tracks.validate("subject")?;
        self.background_tracks.validate("background")?;
        if self.quality_scores.len() < 2 {
            return Err(Error::invalid(
                "signal bundle",
                format!("need at least 2 quality scores, got {}", self.quality_scores.len()),
            ));
        }
        if let Some(t) = self
            .quality_scores
            .iter()
            .position(|q| !(0.0..=1.0).contains(q))
        {
            return Err(Error::invalid(
                "signal bundle",
                format!("quality score {} at frame {t} outside [0, 1]", self.quality_scores[t]),
            ));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let bundle: SignalBundle = crate::manifest::parse_json_line(1, text)?;
        Ok(bundle)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
