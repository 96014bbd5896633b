use std::collections::BTreeMap;
use std::path::Path;

use anyhow::anyhow;
use serde_json::{json, Value};

use rbench_core::agreement::{aggregate_votes, bland_altman, loo_calibrate, spearman, PairwiseVote};
use rbench_core::manifest::parse_jsonl;

use crate::{read_text, write_text, AgreeArgs, CliError, CliResult, RunMeta};

/// Reads per-model scores from a JSON object (`{"model": score}`), a
/// leaderboard JSON (`{"models": [{"model_id", <column>}]}`) or a CSV with a
/// `model_id` column. `columns` lists the accepted score column names in
/// order of preference.
pub fn parse_score_table(path: &Path, text: &str, columns: &[&str]) -> CliResult<BTreeMap<String, f64>> {
    let bad = |msg: String| CliError::domain(anyhow!("{}: {msg}", path.display()));
    if text.trim_start().starts_with('{') {
        let doc: Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        let mut out = BTreeMap::new();
        if let Some(models) = doc.get("models").and_then(Value::as_array) {
            for (i, m) in models.iter().enumerate() {
                let id = m
                    .get("model_id")
                    .and_then(Value::as_str)
                    .ok_or_else(|| bad(format!("models[{i}]: missing model_id")))?;
                let score = columns
                    .iter()
                    .find_map(|c| m.get(*c).and_then(Value::as_f64))
                    .ok_or_else(|| bad(format!("models[{i}]: missing {}", columns.join("/"))))?;
                out.insert(id.to_string(), score);
            }
        } else {
            let obj = doc.as_object().expect("checked for object");
            for (id, v) in obj {
                let score = v
                    .as_f64()
                    .ok_or_else(|| bad(format!("score for `{id}` is not a number")))?;
                out.insert(id.clone(), score);
            }
        }
        return Ok(out);
    }

    let body: String = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect();
    let mut reader = csv::Reader::from_reader(body.as_bytes());
    let headers = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    let id_col = headers
        .iter()
        .position(|h| h == "model_id")
        .ok_or_else(|| bad("no model_id column".into()))?;
    let score_col = columns
        .iter()
        .find_map(|c| headers.iter().position(|h| h == *c))
        .ok_or_else(|| bad(format!("no {} column", columns.join("/"))))?;
    let mut out = BTreeMap::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let score: f64 = rec[score_col]
            .trim()
            .parse()
            .map_err(|_| bad(format!("row {}: invalid score `{}`", i + 1, &rec[score_col])))?;
        out.insert(rec[id_col].to_string(), score);
    }
    Ok(out)
}

/// Builds the agreement report for the given human and benchmark scores over
/// their common models.
pub fn report(
    human: &BTreeMap<String, f64>,
    bench: &BTreeMap<String, f64>,
    meta: &RunMeta,
) -> CliResult<Value> {
    let models: Vec<&String> = human.keys().filter(|m| bench.contains_key(*m)).collect();
    let mut warnings = Vec::new();
    for m in human.keys().filter(|m| !bench.contains_key(*m)) {
        warnings.push(format!("model `{m}` has no benchmark score; excluded"));
    }
    for m in bench.keys().filter(|m| !human.contains_key(*m)) {
        warnings.push(format!("model `{m}` has no human score; excluded"));
    }
    if models.len() < 3 {
        return Err(CliError::domain(anyhow!(
            "need at least 3 models with both human and benchmark scores, got {}",
            models.len()
        )));
    }
    let h: Vec<f64> = models.iter().map(|m| human[*m]).collect();
    let b: Vec<f64> = models.iter().map(|m| bench[*m]).collect();

    let corr = spearman(&h, &b)?;
    let mut rank_table: Vec<(usize, Value)> = corr
        .rank_table
        .iter()
        .enumerate()
        .map(|(i, r)| {
            (
                i,
                json!({
                    "model_id": models[i],
                    "human": h[i],
                    "bench": b[i],
                    "r_h": r.r_h,
                    "r_b": r.r_b,
                    "delta_r": r.delta_r,
                }),
            )
        })
        .collect();
    rank_table.sort_by(|(i, _), (j, _)| {
        corr.rank_table[*i]
            .r_h
            .total_cmp(&corr.rank_table[*j].r_h)
            .then_with(|| models[*i].cmp(models[*j]))
    });

    let (summary, points) = if models.len() >= 4 {
        let pairs: Vec<(f64, f64)> = h.iter().copied().zip(b.iter().copied()).collect();
        let fits = loo_calibrate(&pairs)?;
        let ba_in: Vec<(f64, f64)> = b.iter().zip(&fits).map(|(b, f)| (*b, f.calibrated)).collect();
        let (summary, ba_points) = bland_altman(&ba_in)?;
        let mut rows: Vec<(f64, usize, Value)> = ba_points
            .iter()
            .zip(&fits)
            .enumerate()
            .map(|(i, (p, f))| {
                (
                    p.diff,
                    i,
                    json!({
                        "model_id": models[i],
                        "mean": p.mean,
                        "diff": p.diff,
                        "alpha_loo": f.alpha,
                        "beta_loo": f.beta,
                        "human": h[i],
                        "bench": b[i],
                        "calibrated": f.calibrated,
                    }),
                )
            })
            .collect();
        rows.sort_by(|x, y| y.0.total_cmp(&x.0).then_with(|| models[x.1].cmp(models[y.1])));
        (
            json!(summary),
            Value::Array(rows.into_iter().map(|(_, _, v)| v).collect()),
        )
    } else {
        warnings.push("calibration needs at least 4 models; Bland-Altman omitted".to_string());
        (Value::Null, Value::Array(vec![]))
    };

    Ok(json!({
        "run": meta.to_json(),
        "models": models,
        "correlation": {
            "rho": corr.rho,
            "p_two_sided": corr.p_two_sided,
            "p_method": corr.p_method,
            "rank_table": rank_table.into_iter().map(|(_, v)| v).collect::<Vec<_>>(),
        },
        "bland_altman": summary,
        "points": points,
        "warnings": warnings,
    }))
}

fn load_human(args: &AgreeArgs) -> CliResult<BTreeMap<String, f64>> {
    if let Some(path) = &args.human {
        return parse_score_table(path, &read_text(path)?, &["human", "score"]);
    }
    let path = args.votes.as_ref().expect("clap requires votes or human");
    let votes: Vec<PairwiseVote> = parse_jsonl(&read_text(path)?)
        .map_err(|e| CliError::domain(anyhow!("{}: {e}", path.display())))?;
    let scores = aggregate_votes(&votes)?;
    Ok(scores.iter().map(|(m, s)| (m.to_string(), s)).collect())
}

pub fn run(args: &AgreeArgs, meta: &RunMeta) -> CliResult<String> {
    let human = load_human(args)?;
    let bench = parse_score_table(&args.bench, &read_text(&args.bench)?, &["avg", "bench", "score"])?;
    let doc = report(&human, &bench, meta)?;
    for w in doc["warnings"].as_array().into_iter().flatten() {
        eprintln!("warning: {}", w.as_str().unwrap_or_default());
    }
    write_text(&args.out, &(serde_json::to_string_pretty(&doc).expect("report serializes") + "\n"))?;
    let corr = &doc["correlation"];
    Ok(format!(
        "rho = {:.4} (p = {:.3e}, {} models) -> {}\n",
        corr["rho"].as_f64().unwrap_or(f64::NAN),
        corr["p_two_sided"].as_f64().unwrap_or(f64::NAN),
        doc["models"].as_array().map_or(0, Vec::len),
        args.out.display()
    ))
}
