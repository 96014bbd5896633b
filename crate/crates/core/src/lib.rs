//! Scoring engine for robotic video generation benchmarks.
//!
//! The crate is organised around the data that flows through an evaluation run:
//!
//! - [`model`], [`signals`], [`record`]: samples, extracted signals and judge records
//! - [`manifest`]: manifest parsing and validation
//! - [`motion`]: motion amplitude and motion smoothness from point tracks
//! - [`vqa`]: normalisation of judge outputs into metric values
//! - [`aggregation`]: penalties, per-sample composition and leaderboards
//! - [`agreement`]: human preference votes, rank correlation, calibration and Bland–Altman
//! - [`config`]: flat `key=value` overrides for the tunable parameters

pub mod aggregation;
pub mod agreement;
pub mod config;
pub mod error;
pub mod manifest;
pub mod model;
pub mod motion;
pub mod record;
pub mod signals;
pub mod vqa;

pub use error::{Error, Result};
