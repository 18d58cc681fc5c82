//! JSON file formats for sets, weight functions, and plain integer lists.
//!
//! Canonical set format:
//!
//! ```json
//! { "group": { "Cyclic": { "modulus": 101 } }, "elements": [0, 3, 9] }
//! { "group": { "Vector": { "base": 3, "dim": 4 } }, "elements": [0, 1, 3] }
//! ```
//!
//! A flat spelling is accepted on input for convenience:
//!
//! ```json
//! { "modulus": 101, "elements": [0, 3, 9] }
//! { "base": 3, "dim": 4, "elements": [0, 1, 3] }
//! ```
//!
//! Weight files carry `entries: [[character, weight], ...]` instead of
//! `elements`. Integer-list files (for the sumset tools) are either a bare
//! JSON array or `{ "elements": [...] }`; no group is involved.

use serde_json::Value;
use spectral_core::group::{cyclic_group, vector_group, Group};

use crate::report::LabError;

fn read_json(path: &str) -> Result<Value, LabError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| LabError::config(format!("cannot read {path}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| LabError::config(format!("bad JSON in {path}: {e}")))
}

fn group_from_value(v: &Value, path: &str) -> Result<Group, LabError> {
    // Canonical spelling first.
    if let Some(gv) = v.get("group") {
        let g: Group = serde_json::from_value(gv.clone())
            .map_err(|e| LabError::config(format!("bad group in {path}: {e}")))?;
        return check_group(g);
    }
    // Flat spellings.
    if let Some(m) = v.get("modulus").and_then(Value::as_u64) {
        return check_group(cyclic_group(m).map_err(LabError::from_core)?);
    }
    if let (Some(base), Some(dim)) = (
        v.get("base").and_then(Value::as_u64),
        v.get("dim").and_then(Value::as_u64),
    ) {
        let dim = u32::try_from(dim)
            .map_err(|_| LabError::config(format!("dim out of range in {path}")))?;
        return check_group(vector_group(base, dim).map_err(LabError::from_core)?);
    }
    Err(LabError::config(format!(
        "{path}: expected a \"group\" object or flat \"modulus\" / \"base\"+\"dim\" fields"
    )))
}

/// Enforces the process-wide order cap (`SPECTRAL_LAB_MAX_ORDER`).
pub fn check_group(g: Group) -> Result<Group, LabError> {
    let cap = max_order();
    if g.order() > cap {
        return Err(LabError::resource(format!(
            "group order {} exceeds SPECTRAL_LAB_MAX_ORDER = {}",
            g.order(),
            cap
        )));
    }
    Ok(g)
}

/// Order cap from the environment, default `2^20`.
pub fn max_order() -> u64 {
    match std::env::var("SPECTRAL_LAB_MAX_ORDER") {
        Ok(s) => s.trim().parse().unwrap_or(1 << 20),
        Err(_) => 1 << 20,
    }
}

fn u64_list(v: &Value, key: &str, path: &str) -> Result<Vec<u64>, LabError> {
    let arr = v
        .get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| LabError::config(format!("{path}: missing \"{key}\" array")))?;
    arr.iter()
        .map(|x| {
            x.as_u64()
                .ok_or_else(|| LabError::config(format!("{path}: non-integer entry in {key}")))
        })
        .collect()
}

/// Loads a set file: group + ascending unique elements.
pub fn load_set(path: &str) -> Result<(Group, Vec<u64>), LabError> {
    let v = read_json(path)?;
    let group = group_from_value(&v, path)?;
    let mut elements = u64_list(&v, "elements", path)?;
    elements.sort_unstable();
    elements.dedup();
    for &x in &elements {
        if !group.contains(x) {
            return Err(LabError::config(format!(
                "{path}: element {x} outside the group"
            )));
        }
    }
    Ok((group, elements))
}

/// Loads a weight file: group + (character, weight) pairs.
pub fn load_weights(path: &str) -> Result<(Group, Vec<(u64, f64)>), LabError> {
    let v = read_json(path)?;
    let group = group_from_value(&v, path)?;
    let arr = v
        .get("entries")
        .and_then(Value::as_array)
        .ok_or_else(|| LabError::config(format!("{path}: missing \"entries\" array")))?;
    let mut entries = Vec::with_capacity(arr.len());
    for e in arr {
        let pair = e
            .as_array()
            .filter(|p| p.len() == 2)
            .ok_or_else(|| LabError::config(format!("{path}: entries must be [chi, weight]")))?;
        let chi = pair[0]
            .as_u64()
            .ok_or_else(|| LabError::config(format!("{path}: non-integer character")))?;
        let w = pair[1]
            .as_f64()
            .ok_or_else(|| LabError::config(format!("{path}: non-numeric weight")))?;
        entries.push((chi, w));
    }
    Ok((group, entries))
}

/// Loads a plain integer list (bare array or `{"elements": [...]}`).
pub fn load_ints(path: &str) -> Result<Vec<u64>, LabError> {
    let v = read_json(path)?;
    let arr = match &v {
        Value::Array(a) => a.clone(),
        _ => v
            .get("elements")
            .and_then(Value::as_array)
            .cloned()
            .ok_or_else(|| {
                LabError::config(format!("{path}: expected an array or an \"elements\" field"))
            })?,
    };
    arr.iter()
        .map(|x| {
            x.as_u64()
                .ok_or_else(|| LabError::config(format!("{path}: non-integer entry")))
        })
        .collect()
}

/// Canonical set JSON as a string (used by `behrend --out` and tests).
pub fn set_to_json(group: &Group, elements: &[u64]) -> String {
    let v = serde_json::json!({ "group": group, "elements": elements });
    serde_json::to_string_pretty(&v).expect("set serialization cannot fail")
}

/// Writes text to a path, or to stdout when the path is `-` or absent.
/// A broken pipe on stdout (e.g. piping into `head`) is not an error.
pub fn write_out(out: Option<&str>, text: &str) -> Result<(), LabError> {
    match out {
        None | Some("-") => {
            use std::io::Write;
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            let res = lock.write_all(text.as_bytes()).and_then(|_| {
                if text.ends_with('\n') {
                    Ok(())
                } else {
                    lock.write_all(b"\n")
                }
            });
            match res {
                Ok(()) => Ok(()),
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                Err(e) => Err(LabError::config(format!("cannot write to stdout: {e}"))),
            }
        }
        Some(path) => std::fs::write(path, text)
            .map_err(|e| LabError::config(format!("cannot write {path}: {e}"))),
    }
}
