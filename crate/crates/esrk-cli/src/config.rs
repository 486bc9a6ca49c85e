//! Flat key=value configuration files. Unknown keys are rejected; flags
//! always win over file values.

use std::collections::BTreeMap;

use crate::cli::ExperimentArgs;
use crate::commands::CliError;

const KNOWN_KEYS: &[&str] = &[
    "problem",
    "method",
    "nt",
    "nx",
    "courant",
    "T",
    "iterations",
    "record_every",
    "out",
    "window",
    "resolution",
];

pub fn parse_file(path: &str) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {path}: {e}")))?;
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Usage(format!(
                "{path}:{}: expected key=value, got {line:?}",
                lineno + 1
            )));
        };
        let key = key.trim();
        if !KNOWN_KEYS.contains(&key) {
            return Err(CliError::Usage(format!(
                "{path}:{}: unknown key {key:?}",
                lineno + 1
            )));
        }
        map.insert(key.to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn parse_usize_list(value: &str, key: &str) -> Result<Vec<usize>, CliError> {
    value
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Usage(format!("config {key}: bad integer {tok:?}")))
        })
        .collect()
}

/// Fills unset experiment flags from a config file, when one was given.
pub fn merge(args: &mut ExperimentArgs) -> Result<(), CliError> {
    let Some(path) = args.config.clone() else {
        return Ok(());
    };
    let map = parse_file(&path)?;
    if args.problem.is_none() {
        args.problem = map.get("problem").cloned();
    }
    if args.method.is_none() {
        args.method = map.get("method").cloned();
    }
    if args.nt.is_none() {
        if let Some(v) = map.get("nt") {
            args.nt = Some(parse_usize_list(v, "nt")?);
        }
    }
    if args.nx.is_none() {
        if let Some(v) = map.get("nx") {
            args.nx = Some(parse_usize_list(v, "nx")?);
        }
    }
    if args.courant.is_none() {
        if let Some(v) = map.get("courant") {
            args.courant = Some(
                v.parse()
                    .map_err(|_| CliError::Usage(format!("config courant: bad float {v:?}")))?,
            );
        }
    }
    if args.t_final.is_none() {
        if let Some(v) = map.get("T") {
            args.t_final = Some(
                v.parse()
                    .map_err(|_| CliError::Usage(format!("config T: bad float {v:?}")))?,
            );
        }
    }
    if args.iterations.is_none() {
        if let Some(v) = map.get("iterations") {
            args.iterations =
                Some(v.parse().map_err(|_| {
                    CliError::Usage(format!("config iterations: bad integer {v:?}"))
                })?);
        }
    }
    if args.record_every.is_none() {
        if let Some(v) = map.get("record_every") {
            args.record_every =
                Some(v.parse().map_err(|_| {
                    CliError::Usage(format!("config record_every: bad integer {v:?}"))
                })?);
        }
    }
    if args.out.is_none() {
        args.out = map.get("out").cloned();
    }
    Ok(())
}
