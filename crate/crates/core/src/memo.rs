//! Shared store of memoized structure constants, optionally backed by an
//! append-only JSON-lines cache file.

use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;
use std::sync::{Mutex, RwLock};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pgroups::Partition;

pub const CACHE_VERSION: &str = "hecke-cache/1";
pub const CACHE_FILE: &str = "constants.jsonl";

/// Canonical memo key such as `c:p=2:n=2:M=[1]:N=[1]:L=[1,1]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CacheKey {
    kind: String,
    fields: Vec<(String, String)>,
}

impl CacheKey {
    pub fn new(kind: &str) -> CacheKey {
        CacheKey {
            kind: kind.to_string(),
            fields: Vec::new(),
        }
    }

    pub fn field(mut self, name: &str, value: impl fmt::Display) -> CacheKey {
        self.fields.push((name.to_string(), value.to_string()));
        self
    }

    pub fn kind(&self) -> &str {
        &self.kind
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.fields
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.as_str())
    }
}

impl fmt::Display for CacheKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        for (k, v) in &self.fields {
            write!(f, ":{k}={v}")?;
        }
        Ok(())
    }
}

/// Field names holding partitions; their values must parse canonically.
const PARTITION_FIELDS: &[&str] = &["M", "N", "L", "A", "B"];

impl FromStr for CacheKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<CacheKey> {
        let mut pieces = s.split(':');
        let kind = pieces.next().unwrap_or_default();
        if kind.is_empty() || !kind.chars().all(|c| c.is_ascii_alphanumeric() || c == '-') {
            return Err(Error::Parse(format!("bad cache key kind in {s:?}")));
        }
        let mut key = CacheKey::new(kind);
        for piece in pieces {
            let (name, value) = piece
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad cache key field {piece:?}")))?;
            if name.is_empty() {
                return Err(Error::Parse(format!("empty field name in {s:?}")));
            }
            if PARTITION_FIELDS.contains(&name) {
                let lam: Partition = value.parse()?;
                if lam.to_string() != value {
                    return Err(Error::Parse(format!("non-canonical partition {value:?}")));
                }
            }
            key.fields.push((name.to_string(), value.to_string()));
        }
        Ok(key)
    }
}

/// One line of the cache file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub key: String,
    pub value: String,
    pub version: String,
}

impl CacheRecord {
    pub fn new(key: &str, value: &BigInt) -> CacheRecord {
        CacheRecord {
            key: key.to_string(),
            value: value.to_string(),
            version: CACHE_VERSION.to_string(),
        }
    }

    fn validate(&self) -> Result<BigInt> {
        if self.version != CACHE_VERSION {
            return Err(Error::Parse(format!(
                "unsupported cache version {:?}",
                self.version
            )));
        }
        let key: CacheKey = self.key.parse()?;
        if key.to_string() != self.key {
            return Err(Error::Parse(format!("non-canonical key {:?}", self.key)));
        }
        self.value
            .parse::<BigInt>()
            .map_err(|e| Error::Parse(format!("bad value {:?}: {e}", self.value)))
    }
}

/// Memoized integers keyed by canonical strings. Reads are concurrent,
/// writes serialized.
#[derive(Default)]
pub struct Memo {
    values: RwLock<HashMap<String, BigInt>>,
    fresh: Mutex<Vec<String>>,
}

impl Memo {
    pub fn new() -> Memo {
        Memo::default()
    }

    pub fn get(&self, key: &str) -> Option<BigInt> {
        self.values.read().expect("memo lock").get(key).cloned()
    }

    pub fn insert(&self, key: String, value: BigInt) {
        let mut map = self.values.write().expect("memo lock");
        if let Entry::Vacant(slot) = map.entry(key) {
            self.fresh
                .lock()
                .expect("memo lock")
                .push(slot.key().clone());
            slot.insert(value);
        }
    }

    pub fn get_or_try_insert<F>(&self, key: &CacheKey, compute: F) -> Result<BigInt>
    where
        F: FnOnce() -> Result<BigInt>,
    {
        let key = key.to_string();
        if let Some(v) = self.get(&key) {
            return Ok(v);
        }
        let v = compute()?;
        self.insert(key, v.clone());
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.values.read().expect("memo lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All entries, sorted by key.
    pub fn snapshot(&self) -> BTreeMap<String, BigInt> {
        self.values
            .read()
            .expect("memo lock")
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect()
    }

    /// Loads records from a cache file, skipping (and logging) corrupt lines.
    /// Loaded entries are not considered fresh. Returns `(loaded, skipped)`.
    pub fn load_file(&self, path: &Path) -> Result<(usize, usize)> {
        let file = match File::open(path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok((0, 0)),
            Err(e) => return Err(e.into()),
        };
        let mut loaded = 0;
        let mut skipped = 0;
        let mut map = self.values.write().expect("memo lock");
        for (lineno, line) in BufReader::new(file).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parsed = serde_json::from_str::<CacheRecord>(&line)
                .map_err(|e| Error::Parse(e.to_string()))
                .and_then(|rec| rec.validate().map(|v| (rec.key, v)));
            match parsed {
                Ok((key, value)) => {
                    map.insert(key, value);
                    loaded += 1;
                }
                Err(e) => {
                    log::warn!(
                        "{}:{}: skipping corrupt cache line: {e}",
                        path.display(),
                        lineno + 1
                    );
                    skipped += 1;
                }
            }
        }
        Ok((loaded, skipped))
    }

    /// Appends every entry inserted since the last flush. Returns the number
    /// of records written.
    pub fn flush_to(&self, path: &Path) -> Result<usize> {
        let keys: Vec<String> = std::mem::take(&mut *self.fresh.lock().expect("memo lock"));
        if keys.is_empty() {
            return Ok(0);
        }
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let map = self.values.read().expect("memo lock");
        let mut out = String::new();
        for key in &keys {
            let rec = CacheRecord::new(key, &map[key]);
            out.push_str(&serde_json::to_string(&rec).map_err(|e| Error::Io(e.to_string()))?);
            out.push('\n');
        }
        let mut file = OpenOptions::new().create(true).append(true).open(path)?;
        file.write_all(out.as_bytes())?;
        Ok(keys.len())
    }
}
