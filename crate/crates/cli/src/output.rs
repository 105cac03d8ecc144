//! Atomic run directories.
//!
//! A run is staged in a hidden sibling directory that holds a provisional
//! manifest before any result is computed. Once every table is written the
//! manifest is rewritten with content hashes and the directory is renamed
//! into place. Any failure removes the staging directory.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::record::{write_csv, Table, CODE_VERSION, MANIFEST_FILE};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FileEntry {
    pub file: String,
    pub rows: usize,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Manifest {
    pub experiment: String,
    pub code_version: String,
    pub seed: u64,
    pub jobs: usize,
    pub cut_policy: String,
    pub parameters: BTreeMap<String, String>,
    /// `running` while staged, `complete` once renamed into place.
    pub status: String,
    pub started_unix: u64,
    pub wall_time_s: f64,
    pub files: Vec<FileEntry>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn write_manifest(dir: &Path, m: &Manifest) -> Result<()> {
    fs::write(dir.join(MANIFEST_FILE), serde_json::to_vec_pretty(m)?)?;
    Ok(())
}

pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    Ok(serde_json::from_slice(&fs::read(dir.join(MANIFEST_FILE))?)?)
}

pub fn staging_dir(out_dir: &Path, id: &str) -> PathBuf {
    out_dir.join(format!(".{id}.partial"))
}

/// Runs `produce` and publishes its tables under `out_dir/<id>`.
///
/// The timing fields live only in the manifest, so the CSV payloads of two
/// runs with the same configuration are byte-identical.
pub fn publish(
    out_dir: &Path,
    manifest: Manifest,
    produce: impl FnOnce() -> Result<Vec<Table>>,
) -> Result<(PathBuf, Manifest, Vec<Table>)> {
    fs::create_dir_all(out_dir)?;
    let stage = staging_dir(out_dir, &manifest.experiment);
    if stage.exists() {
        fs::remove_dir_all(&stage)?;
    }
    fs::create_dir(&stage)?;
    let result = stage_run(&stage, manifest, produce);
    let (manifest, tables) = match result {
        Ok(v) => v,
        Err(e) => {
            let _ = fs::remove_dir_all(&stage);
            return Err(e);
        }
    };
    let target = out_dir.join(&manifest.experiment);
    let swap = || -> Result<()> {
        if target.exists() {
            fs::remove_dir_all(&target)?;
        }
        fs::rename(&stage, &target)?;
        Ok(())
    };
    if let Err(e) = swap() {
        let _ = fs::remove_dir_all(&stage);
        return Err(e);
    }
    Ok((target, manifest, tables))
}

fn stage_run(
    stage: &Path,
    mut manifest: Manifest,
    produce: impl FnOnce() -> Result<Vec<Table>>,
) -> Result<(Manifest, Vec<Table>)> {
    manifest.status = "running".into();
    manifest.code_version = CODE_VERSION.into();
    manifest.started_unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    write_manifest(stage, &manifest)?;
    let t0 = Instant::now();
    let tables = produce()?;
    manifest.wall_time_s = t0.elapsed().as_secs_f64();
    manifest.files.clear();
    for t in &tables {
        let mut buf = Vec::new();
        write_csv(&mut buf, &t.records)?;
        fs::write(stage.join(t.file_name()), &buf)?;
        manifest.files.push(FileEntry {
            file: t.file_name(),
            rows: t.records.len(),
            sha256: sha256_hex(&buf),
        });
    }
    manifest.status = "complete".into();
    write_manifest(stage, &manifest)?;
    Ok((manifest, tables))
}
