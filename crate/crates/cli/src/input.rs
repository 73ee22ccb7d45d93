use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use blocksmith_core::intmat::IntMatrix;
use blocksmith_core::gram::RowCount;
use num_bigint::BigInt;

/// A matrix given inline as JSON or as a path to a JSON file.
pub fn matrix(flag: &str, arg: &str) -> Result<IntMatrix> {
    let path = Path::new(arg);
    let looks_inline = arg.trim_start().starts_with(['[', '{']);
    let (text, origin) = if !looks_inline && path.is_file() {
        let text = std::fs::read_to_string(path).with_context(|| format!("{flag}: reading {arg}"))?;
        (text, arg.to_string())
    } else if looks_inline {
        if path.is_file() {
            bail!("{flag}: {arg:?} is both a file name and a JSON literal");
        }
        (arg.to_string(), "inline".to_string())
    } else {
        bail!("{flag}: {arg:?} is neither a JSON matrix nor an existing file");
    };
    serde_json::from_str(&text).map_err(|e| anyhow!("{flag} ({origin}): {e}"))
}

pub fn int_list(flag: &str, arg: &str) -> Result<Vec<BigInt>> {
    arg.split(',')
        .enumerate()
        .filter(|(_, s)| !s.trim().is_empty())
        .map(|(i, s)| s.trim().parse().map_err(|_| anyhow!("{flag}: item {} ({s:?}) is not an integer", i + 1)))
        .collect()
}

pub fn index_list(flag: &str, arg: &str) -> Result<Vec<usize>> {
    arg.split(',')
        .enumerate()
        .filter(|(_, s)| !s.trim().is_empty())
        .map(|(i, s)| s.trim().parse().map_err(|_| anyhow!("{flag}: item {} ({s:?}) is not an index", i + 1)))
        .collect()
}

/// `K` or `K1..K2`.
pub fn row_count(arg: &str) -> Result<RowCount> {
    let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| anyhow!("--rows: {s:?} is not a row count"));
    match arg.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (parse(a)?, parse(b)?);
            if a > b {
                bail!("--rows: empty range {arg}");
            }
            Ok(RowCount::Range(a, b))
        }
        None => Ok(RowCount::Exact(parse(arg)?)),
    }
}

pub fn max_sum() -> Result<u64> {
    match std::env::var("BLOCKSMITH_MAX_SUM") {
        Ok(v) => v.trim().parse().map_err(|_| anyhow!("BLOCKSMITH_MAX_SUM={v:?} is not a non-negative integer")),
        Err(_) => Ok(blocksmith_core::cartan::DEFAULT_MAX_SUM),
    }
}
