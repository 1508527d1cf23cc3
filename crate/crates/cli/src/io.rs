use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};

/// Bad flag combinations; the process exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(UsageError(msg.into()).into())
}

/// `QUE_THREADS` must be a positive integer when set. Work runs on one thread
/// either way.
pub fn check_thread_env() -> Result<()> {
    match std::env::var("QUE_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(t) if t >= 1 => Ok(()),
            _ => usage(format!("QUE_THREADS must be a positive integer, got {v:?}")),
        },
        Err(_) => Ok(()),
    }
}

pub fn write_output(path: Option<&Path>, body: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, body).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(body.as_bytes())?;
            Ok(())
        }
    }
}

pub fn scores_csv(scores: &[f64]) -> String {
    let mut s = String::from("index,score\n");
    for (i, v) in scores.iter().enumerate() {
        s.push_str(&format!("{i},{v}\n"));
    }
    s
}

pub fn scores_json(scores: &[f64]) -> Result<String> {
    let v = serde_json::json!({ "scores": scores });
    Ok(serde_json::to_string(&v)? + "\n")
}

/// Reads scores written by `score`: `index,score` CSV or `{"scores": [...]}` JSON.
pub fn read_scores(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        let v: serde_json::Value = serde_json::from_str(trimmed)?;
        let arr = v.get("scores").unwrap_or(&v);
        let arr = arr.as_array().context("scores JSON must hold an array")?;
        return arr
            .iter()
            .map(|x| x.as_f64().context("non-numeric score"))
            .collect();
    }
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (lineno == 0 && line.starts_with("index")) {
            continue;
        }
        let field = line.rsplit(',').next().unwrap_or(line);
        let v: f64 = field
            .trim()
            .parse()
            .with_context(|| format!("{}:{}: bad score {field:?}", path.display(), lineno + 1))?;
        out.push(v);
    }
    Ok(out)
}

/// Reads one 0/1 label per line; a non-numeric first line is a header.
pub fn read_labels(path: &Path) -> Result<Vec<bool>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let field = line.rsplit(',').next().unwrap_or(line).trim();
        match field {
            "" => continue,
            "0" => out.push(false),
            "1" => out.push(true),
            _ if lineno == 0 => continue,
            other => bail!("{}:{}: label {other:?} is not 0 or 1", path.display(), lineno + 1),
        }
    }
    Ok(out)
}

pub fn labels_csv(labels: &[bool]) -> String {
    labels
        .iter()
        .map(|&l| if l { "1\n" } else { "0\n" })
        .collect()
}

pub fn row_csv(values: impl IntoIterator<Item = f64>) -> String {
    let parts: Vec<String> = values.into_iter().map(|v| v.to_string()).collect();
    parts.join(",") + "\n"
}
