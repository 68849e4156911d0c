//! Behavior-table JSON and atomic file output.
//!
//! The table format is
//! `{"round": k, "probs": {"xyz;abc": p, ...}}` with all 64 keys present.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::behavior::{index, split_index, BehaviorTable, NORMALIZATION_TOL};
use crate::error::{Error, Result};

fn key(i: usize) -> String {
    let ([x, y, z], [a, b, c]) = split_index(i);
    format!("{x}{y}{z};{a}{b}{c}")
}

pub fn behavior_to_json(t: &BehaviorTable) -> Value {
    let probs: Map<String, Value> = (0..64).map(|i| (key(i), Value::from(t.probs[i]))).collect();
    let mut root = Map::new();
    root.insert("round".into(), Value::from(t.round));
    root.insert("probs".into(), Value::Object(probs));
    Value::Object(root)
}

pub fn behavior_to_string(t: &BehaviorTable) -> String {
    let mut s = serde_json::to_string_pretty(&behavior_to_json(t)).expect("plain JSON value");
    s.push('\n');
    s
}

pub fn behavior_from_str(text: &str) -> Result<BehaviorTable> {
    let root: Value = serde_json::from_str(text)
        .map_err(|e| Error::MalformedBehavior(format!("not JSON: {e}")))?;
    let obj = root
        .as_object()
        .ok_or_else(|| Error::MalformedBehavior("top level must be an object".into()))?;
    let round = obj.get("round").and_then(Value::as_u64).ok_or_else(|| {
        Error::MalformedBehavior("\"round\" must be a non-negative integer".into())
    })?;
    let probs = obj
        .get("probs")
        .and_then(Value::as_object)
        .ok_or_else(|| Error::MalformedBehavior("\"probs\" must be an object".into()))?;
    let mut out = [0.0; 64];
    for s in 0..8 {
        for o in 0..8 {
            let i = (s << 3) | o;
            let k = key(i);
            let v = probs
                .get(&k)
                .ok_or_else(|| Error::MalformedBehavior(format!("missing key {k:?}")))?;
            out[i] = v.as_f64().ok_or_else(|| {
                Error::MalformedBehavior(format!("value at {k:?} is not a number"))
            })?;
        }
    }
    if let Some(extra) = probs.keys().find(|k| parse_key(k).is_none()) {
        return Err(Error::MalformedBehavior(format!(
            "unexpected key {extra:?}"
        )));
    }
    let t = BehaviorTable::from_probs(out, round as usize);
    t.check_normalized(NORMALIZATION_TOL)?;
    Ok(t)
}

fn parse_key(k: &str) -> Option<usize> {
    let (inputs, outcomes) = k.split_once(';')?;
    let bit = |c: char| match c {
        '0' => Some(0usize),
        '1' => Some(1usize),
        _ => None,
    };
    let ib: Vec<usize> = inputs.chars().map(bit).collect::<Option<_>>()?;
    let ob: Vec<usize> = outcomes.chars().map(bit).collect::<Option<_>>()?;
    if ib.len() != 3 || ob.len() != 3 {
        return None;
    }
    Some(index(ib[0], ib[1], ib[2], ob[0], ob[1], ob[2]))
}

pub fn export_behavior(t: &BehaviorTable, path: &Path) -> Result<()> {
    write_atomic(path, behavior_to_string(t).as_bytes())
}

pub fn import_behavior(path: &Path) -> Result<BehaviorTable> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    behavior_from_str(&text)
}

/// Writes to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let io_err = |p: &Path| {
        let p = p.to_path_buf();
        move |source| Error::Io { path: p, source }
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    let mut tmp: PathBuf = path.to_path_buf();
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidConfig(format!("{} is not a file path", path.display())))?;
    tmp.set_file_name(format!(".{}.tmp", name.to_string_lossy()));
    fs::write(&tmp, contents).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}
