//! Output files, flat JSON and the run manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

pub const OUT_DIR_ENV: &str = "KHESS_OUT_DIR";

/// Flattens nested objects into dotted keys and turns every number into its
/// shortest round-trip decimal string.
pub fn flatten(value: &Value) -> Value {
    let mut out = Map::new();
    match value {
        Value::Object(obj) => {
            for (k, v) in obj {
                flatten_into(k, v, &mut out);
            }
        }
        other => {
            out.insert("value".into(), scalar(other));
        }
    }
    Value::Object(out)
}

fn flatten_into(prefix: &str, value: &Value, out: &mut Map<String, Value>) {
    match value {
        Value::Object(obj) => {
            for (k, v) in obj {
                flatten_into(&format!("{prefix}.{k}"), v, out);
            }
        }
        Value::Array(items) if items.iter().all(|v| !v.is_object() && !v.is_array()) => {
            out.insert(prefix.into(), Value::Array(items.iter().map(scalar).collect()));
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten_into(&format!("{prefix}.{i}"), v, out);
            }
        }
        other => {
            out.insert(prefix.into(), scalar(other));
        }
    }
}

fn scalar(v: &Value) -> Value {
    match v {
        Value::Number(n) => Value::String(n.to_string()),
        other => other.clone(),
    }
}

pub fn flat_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("serialisable");
    let mut s = serde_json::to_string_pretty(&flatten(&v)).expect("serialisable");
    s.push('\n');
    s
}

/// `f64` as a decimal string, `inf` and `nan` spelled out.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        serde_json::Number::from_f64(x).map(|n| n.to_string()).unwrap_or_default()
    } else {
        x.to_string()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: String,
    pub limit: String,
    pub passed: bool,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    pub parameters: BTreeMap<String, String>,
    pub tolerances: BTreeMap<String, String>,
    /// File name to SHA-256 hex digest.
    pub outputs: BTreeMap<String, String>,
    pub checks: BTreeMap<String, String>,
}

/// Collects the files of one run and writes the manifest last.
pub struct Run {
    dir: PathBuf,
    stem: String,
    manifest: RunManifest,
    checks: Vec<Check>,
}

impl Run {
    pub fn new(dir: &Path, command: &str, stem: String) -> std::io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            stem,
            manifest: RunManifest {
                command: command.into(),
                tool_version: env!("CARGO_PKG_VERSION").into(),
                parameters: BTreeMap::new(),
                tolerances: BTreeMap::new(),
                outputs: BTreeMap::new(),
                checks: BTreeMap::new(),
            },
            checks: Vec::new(),
        })
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.manifest.parameters.insert(key.into(), value.to_string());
    }

    pub fn tol(&mut self, key: &str, value: f64) {
        self.manifest.tolerances.insert(key.into(), num(value));
    }

    /// Path under the output directory for `suffix`, e.g. `.csv`.
    pub fn path(&self, suffix: &str) -> PathBuf {
        self.dir.join(format!("{}{suffix}", self.stem))
    }

    pub fn write(&mut self, path: &Path, contents: &str) -> std::io::Result<()> {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                fs::create_dir_all(parent)?;
            }
        }
        fs::write(path, contents)?;
        let digest = Sha256::digest(contents.as_bytes());
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        self.manifest.outputs.insert(name, hex);
        Ok(())
    }

    pub fn write_suffix(&mut self, suffix: &str, contents: &str) -> std::io::Result<PathBuf> {
        let path = self.path(suffix);
        self.write(&path, contents)?;
        Ok(path)
    }

    /// Records `value <= limit`.
    pub fn check_at_most(&mut self, name: &str, value: f64, limit: f64) -> bool {
        self.push(name, num(value), format!("<= {}", num(limit)), value <= limit)
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl ToString) -> bool {
        self.push(name, detail.to_string(), String::new(), passed)
    }

    fn push(&mut self, name: &str, value: String, limit: String, passed: bool) -> bool {
        let verdict = if passed { "PASS" } else { "FAIL" };
        if limit.is_empty() {
            println!("check {name}: {verdict} ({value})");
        } else {
            println!("check {name}: {verdict} ({value} {limit})");
        }
        self.manifest.checks.insert(name.into(), verdict.into());
        self.checks.push(Check { name: name.into(), value, limit, passed });
        passed
    }

    /// Writes the manifest and reports whether every check passed.
    pub fn finish(self) -> std::io::Result<bool> {
        let path = self.path(".manifest.json");
        let text = flat_json(&self.manifest);
        fs::write(&path, text)?;
        Ok(self.checks.iter().all(|c| c.passed))
    }
}
