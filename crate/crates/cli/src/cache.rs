//! On-disk result cache: one JSON record per file, written atomically.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Davenport,
    Extremal,
    Verify,
}

impl Kind {
    fn as_str(self) -> &'static str {
        match self {
            Kind::Davenport => "davenport",
            Kind::Extremal => "extremal",
            Kind::Verify => "verify",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CacheRecord {
    pub schema_version: u32,
    pub group_spec: String,
    pub kind: Kind,
    pub payload: String,
    pub content_hash: String,
}

pub fn content_hash(payload: &str) -> String {
    hex::encode(Sha256::digest(payload.as_bytes()))
}

impl CacheRecord {
    pub fn new(kind: Kind, group_spec: &str, payload: String) -> CacheRecord {
        CacheRecord {
            schema_version: SCHEMA_VERSION,
            group_spec: group_spec.to_string(),
            kind,
            content_hash: content_hash(&payload),
            payload,
        }
    }
}

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn open(dir: &Path) -> io::Result<Cache> {
        fs::create_dir_all(dir)?;
        Ok(Cache { dir: dir.to_path_buf() })
    }

    /// `key` is the file-name-safe group part, e.g. `D_8` or `dihedral_D_8`.
    pub fn path(&self, kind: Kind, key: &str) -> PathBuf {
        self.dir
            .join(format!("{}-{key}-v{SCHEMA_VERSION}.jsonl", kind.as_str()))
    }

    /// The stored payload, if a valid record exists. Corrupt records are
    /// reported on stderr and treated as absent.
    pub fn lookup(&self, kind: Kind, key: &str) -> Option<CacheRecord> {
        let path = self.path(kind, key);
        let text = fs::read_to_string(&path).ok()?;
        match validate(&text, kind) {
            Ok(record) => Some(record),
            Err(reason) => {
                eprintln!(
                    "warning: ignoring cache record {}: {reason}; recomputing",
                    path.display()
                );
                None
            }
        }
    }

    pub fn store(&self, key: &str, record: &CacheRecord) -> io::Result<()> {
        let path = self.path(record.kind, key);
        let tmp = path.with_extension(format!("tmp.{}", std::process::id()));
        let mut line = serde_json::to_string(record).map_err(io::Error::other)?;
        line.push('\n');
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(line.as_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &path)
    }

    /// Every valid record in the directory, sorted by file name.
    pub fn records(&self) -> io::Result<Vec<CacheRecord>> {
        let mut paths: Vec<PathBuf> = fs::read_dir(&self.dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
            .collect();
        paths.sort();
        let mut out = Vec::new();
        for path in paths {
            let Ok(text) = fs::read_to_string(&path) else { continue };
            let Ok(record) = serde_json::from_str::<CacheRecord>(text.trim_end()) else {
                eprintln!("warning: skipping unreadable cache record {}", path.display());
                continue;
            };
            if record.schema_version != SCHEMA_VERSION {
                continue;
            }
            if record.content_hash != content_hash(&record.payload) {
                eprintln!(
                    "warning: skipping cache record {} with a bad content hash",
                    path.display()
                );
                continue;
            }
            out.push(record);
        }
        Ok(out)
    }
}

fn validate(text: &str, kind: Kind) -> Result<CacheRecord, String> {
    let record: CacheRecord = serde_json::from_str(text.trim_end()).map_err(|e| format!("unreadable ({e})"))?;
    if record.schema_version != SCHEMA_VERSION {
        return Err(format!(
            "schema version {} is not {SCHEMA_VERSION}",
            record.schema_version
        ));
    }
    if record.kind != kind {
        return Err(format!("kind {:?} does not match {:?}", record.kind, kind));
    }
    if record.content_hash != content_hash(&record.payload) {
        return Err("content hash does not match payload".to_string());
    }
    Ok(record)
}
