use std::fmt::Write;

use anyhow::anyhow;
use rbench_core::manifest::{parse_manifest, validate_manifest, Flag, ValidationReport, Violation};

use crate::{read_text, CliError, CliResult, ValidateArgs};

pub fn render(report: &ValidationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "samples: {}", report.total);
    let tasks: Vec<String> = report
        .task_counts
        .iter()
        .map(|(t, n)| format!("{t}={n}"))
        .collect();
    let _ = writeln!(out, "tasks: {}", tasks.join(" "));
    let embodiments: Vec<String> = report
        .embodiment_counts
        .iter()
        .map(|(e, n)| format!("{e}={n}"))
        .collect();
    let _ = writeln!(out, "embodiments: {}", embodiments.join(" "));
    for v in &report.violations {
        let line = match v {
            Violation::DuplicateId {
                sample_id,
                occurrences,
            } => format!("duplicate sample_id `{sample_id}` ({occurrences} occurrences)"),
            Violation::MissingReferenceImage { sample_id, path } => {
                format!("sample `{sample_id}`: reference image `{path}` not found")
            }
            Violation::EventListMismatch { sample_id } => format!(
                "sample `{sample_id}`: event list must be non-empty exactly for LongHorizonPlanning"
            ),
            Violation::QuestionChainMismatch { sample_id } => format!(
                "sample `{sample_id}`: question chain must be non-empty exactly for VisualReasoning"
            ),
        };
        let _ = writeln!(out, "error: {line}");
    }
    for f in &report.flags {
        let line = match f {
            Flag::ManifestEmpty => "manifest empty".to_string(),
            Flag::TaskCount {
                task,
                count,
                expected,
            } => format!("{task}: {count} samples (expected {expected})"),
            Flag::EmbodimentCount {
                embodiment,
                count,
                expected,
            } => format!("{embodiment}: {count} embodiment-split samples (expected {expected})"),
        };
        let _ = writeln!(out, "warning: {line}");
    }
    let _ = writeln!(
        out,
        "{} error(s), {} warning(s)",
        report.violations.len(),
        report.flags.len()
    );
    out
}

pub fn run(args: &ValidateArgs) -> CliResult<String> {
    let text = read_text(&args.manifest)?;
    let samples = parse_manifest(&text)
        .map_err(|e| CliError::domain(anyhow!("{}: {e}", args.manifest.display())))?;
    let root = args
        .manifest
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or_else(|| std::path::Path::new("."));
    let report = validate_manifest(&samples, Some(root));
    let rendered = render(&report);
    if report.is_ok() {
        Ok(rendered)
    } else {
        Err(CliError::domain(anyhow!("{}", rendered.trim_end())))
    }
}
