use std::fmt::Write;

use anyhow::anyhow;
use serde_json::{json, Map, Value};

use rbench_core::aggregation::{aggregate_models, rank_models, Indicator, LeaderboardEntry, SampleStrata};
use rbench_core::manifest::parse_manifest;
use rbench_core::model::Stratum;

use crate::score::parse_results;
use crate::{read_text, write_text, AggregateArgs, CliError, CliResult, OutputFormat, RunMeta, TableKind};

pub fn columns(table: TableKind) -> &'static [Indicator] {
    match table {
        TableKind::Main => &Indicator::ALL,
        TableKind::Task => &Indicator::TASKS,
        TableKind::Embodiment => &Indicator::EMBODIMENTS,
    }
}

fn table_name(table: TableKind) -> &'static str {
    match table {
        TableKind::Main => "main",
        TableKind::Task => "task",
        TableKind::Embodiment => "embodiment",
    }
}

pub fn render_csv(meta: &RunMeta, board: &[LeaderboardEntry], table: TableKind) -> CliResult<String> {
    let cols = columns(table);
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["model_id", "rank", "avg"];
    header.extend(cols.iter().map(|c| c.column()));
    w.write_record(&header).map_err(CliError::io)?;
    for e in board {
        let mut rec = vec![e.model.model_id.clone(), e.rank.to_string(), e.model.avg.to_string()];
        rec.extend(
            cols.iter()
                .map(|c| e.model.indicators.get(*c).map(|v| v.to_string()).unwrap_or_default()),
        );
        w.write_record(&rec).map_err(CliError::io)?;
    }
    let body = String::from_utf8(w.into_inner().map_err(|e| CliError::io(anyhow!("{e}")))?)
        .expect("csv output is utf-8");
    Ok(format!("# run: {}\n{body}", meta.header_line()))
}

pub fn render_json(meta: &RunMeta, board: &[LeaderboardEntry], table: TableKind) -> String {
    let models: Vec<Value> = board
        .iter()
        .map(|e| {
            let indicators: Map<String, Value> = columns(table)
                .iter()
                .map(|c| (c.column().to_string(), json!(e.model.indicators.get(*c))))
                .collect();
            json!({
                "model_id": e.model.model_id,
                "rank": e.rank,
                "avg": e.model.avg,
                "indicators": indicators,
            })
        })
        .collect();
    let doc = json!({
        "run": meta.to_json(),
        "table": table_name(table),
        "models": models,
    });
    serde_json::to_string_pretty(&doc).expect("leaderboard serializes") + "\n"
}

pub fn render_text(meta: &RunMeta, board: &[LeaderboardEntry], table: TableKind) -> String {
    let cols = columns(table);
    let width = board
        .iter()
        .map(|e| e.model.model_id.len())
        .chain(["Model".len()])
        .max()
        .unwrap_or(5);
    let mut out = format!("# run: {}\n", meta.header_line());
    let _ = write!(out, "{:<width$}  {:>4}", "Model", "Rank");
    for c in cols {
        let _ = write!(out, "  {:>12}", c.title());
    }
    let _ = writeln!(out, "  {:>6}", "Avg");
    for e in board {
        let _ = write!(out, "{:<width$}  {:>4}", e.model.model_id, e.rank);
        for c in cols {
            match e.model.indicators.get(*c) {
                Some(v) => {
                    let _ = write!(out, "  {v:>12.3}");
                }
                None => {
                    let _ = write!(out, "  {:>12}", "-");
                }
            }
        }
        let _ = writeln!(out, "  {:>6.3}", e.model.avg);
    }
    out
}

pub fn run(args: &AggregateArgs, meta: &RunMeta) -> CliResult<String> {
    let rows = parse_results(&read_text(&args.results)?)
        .map_err(|e| CliError::domain(anyhow!("{}: {}", args.results.display(), e.error)))?;

    let mut strata = match &args.manifest {
        Some(path) => {
            let samples = parse_manifest(&read_text(path)?)
                .map_err(|e| CliError::domain(anyhow!("{}: {e}", path.display())))?;
            SampleStrata::from_manifest(&samples)
        }
        None => SampleStrata::default(),
    };
    let mut scores = Vec::with_capacity(rows.len());
    let mut incomplete = 0usize;
    for row in &rows {
        if args.manifest.is_none() {
            strata.insert(
                row.sample_id.clone(),
                Stratum {
                    task: row.task_category,
                    embodiment: row.embodiment,
                },
            );
        }
        match row.complete() {
            Some(s) => scores.push(s),
            None => incomplete += 1,
        }
    }
    if incomplete > 0 {
        eprintln!("warning: {incomplete} incomplete row(s) ignored");
    }
    if scores.is_empty() {
        return Err(CliError::domain(anyhow!(
            "{}: no complete score rows",
            args.results.display()
        )));
    }

    let models = aggregate_models(&scores, &strata)?;
    for m in &models {
        for w in &m.warnings {
            eprintln!("warning: {w}");
        }
    }
    let board = rank_models(models);
    let text = match args.format {
        OutputFormat::Csv => render_csv(meta, &board, args.table)?,
        OutputFormat::Json => render_json(meta, &board, args.table),
        OutputFormat::Text => render_text(meta, &board, args.table),
    };
    write_text(&args.out, &text)?;
    Ok(format!(
        "ranked {} model(s) from {} sample score(s) -> {}\n",
        board.len(),
        scores.len(),
        args.out.display()
    ))
}
