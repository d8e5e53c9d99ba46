use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use hf2d::field::{write_dump, GridField, Sample};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Artifact {
    pub path: String,
    pub kind: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub config: ExperimentConfig,
    /// `ok`, `solver-failure` or `error`.
    pub status: String,
    pub exit_code: i32,
    pub message: Option<String>,
    pub threads: usize,
    pub artifacts: Vec<Artifact>,
    /// Not part of the determinism contract.
    pub wall_clock_seconds: f64,
}

/// Writes artifacts into the output directory and remembers their checksums.
pub struct Sink {
    dir: PathBuf,
    artifacts: Vec<Artifact>,
}

impl Sink {
    /// Creates `dir`, removing the outputs of an earlier run listed in its
    /// manifest. Refuses directories holding anything else.
    pub fn open(dir: &Path) -> anyhow::Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("out: creating {}", dir.display()))?;
        let old = dir.join(MANIFEST_NAME);
        if old.exists() {
            if let Ok(m) = read_manifest(dir) {
                for a in m.artifacts {
                    let _ = fs::remove_file(dir.join(a.path));
                }
            }
            fs::remove_file(&old)?;
        }
        if let Some(e) = fs::read_dir(dir)?.next() {
            bail!("out: {} holds files not written by hf2d, e.g. {:?}", dir.display(), e?.file_name());
        }
        Ok(Sink { dir: dir.to_path_buf(), artifacts: Vec::new() })
    }

    fn put(&mut self, name: &str, kind: &str, bytes: Vec<u8>) -> anyhow::Result<()> {
        let sha = Sha256::digest(&bytes);
        fs::write(self.dir.join(name), &bytes).with_context(|| format!("writing {name}"))?;
        self.artifacts.push(Artifact {
            path: name.to_string(),
            kind: kind.to_string(),
            bytes: bytes.len() as u64,
            sha256: sha.iter().map(|b| format!("{b:02x}")).collect(),
        });
        Ok(())
    }

    pub fn csv<I, R>(&mut self, name: &str, header: &[&str], rows: I) -> anyhow::Result<()>
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator<Item = String>,
    {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("csv buffer: {e}"))?;
        self.put(name, "csv", bytes)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> anyhow::Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.put(name, "json", bytes)
    }

    pub fn dump<T: Sample>(&mut self, name: &str, field: &GridField<T>) -> anyhow::Result<()> {
        let mut bytes = Vec::with_capacity(32 + 16 * field.grid().len());
        write_dump(field, &mut bytes)?;
        self.put(name, "field", bytes)
    }

    pub fn finish(self, manifest: RunManifest) -> anyhow::Result<RunManifest> {
        let m = RunManifest { artifacts: self.artifacts, ..manifest };
        let mut bytes = serde_json::to_vec_pretty(&m)?;
        bytes.push(b'\n');
        fs::write(self.dir.join(MANIFEST_NAME), bytes)?;
        Ok(m)
    }
}

pub fn read_manifest(dir: &Path) -> anyhow::Result<RunManifest> {
    let text = fs::read_to_string(dir.join(MANIFEST_NAME))?;
    Ok(serde_json::from_str(&text)?)
}

/// `(path, sha256)` of every artifact listed in the manifest under `dir`.
pub fn manifest_artifacts(dir: &Path) -> anyhow::Result<Vec<(String, String)>> {
    Ok(read_manifest(dir)?.artifacts.into_iter().map(|a| (a.path, a.sha256)).collect())
}

/// `f64` cell text: shortest representation that round-trips.
pub fn num(v: f64) -> String {
    format!("{v}")
}
