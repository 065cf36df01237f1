//! Append-only block-rank cache.
//!
//! One JSON object per line in `<dir>/blocks.jsonl`:
//! `{"n":2,"d":2,"b":0,"p":1,"q":1,"mdeg":[2,1,1],"prime":2147483647,"rank":3}`.
//! Records are only ever appended; a key that is already present is never
//! written again. Lines that fail to parse are moved to `quarantine.jsonl`
//! with a warning. Compaction happens only through [`cache_gc`].

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CACHE_FILE: &str = "blocks.jsonl";
pub const QUARANTINE_FILE: &str = "quarantine.jsonl";
pub const CACHE_DIR_ENV: &str = "VSL_CACHE_DIR";

/// Key of one cached block rank. `mdeg` is the orbit representative.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CacheKey {
    pub n: u32,
    pub d: u32,
    pub b: i64,
    pub p: i64,
    pub q: i64,
    pub mdeg: Vec<u32>,
    pub prime: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockCacheRecord {
    pub n: u32,
    pub d: u32,
    pub b: i64,
    pub p: i64,
    pub q: i64,
    pub mdeg: Vec<u32>,
    pub prime: u32,
    pub rank: u64,
}

impl BlockCacheRecord {
    pub fn new(key: CacheKey, rank: u64) -> Self {
        Self {
            n: key.n,
            d: key.d,
            b: key.b,
            p: key.p,
            q: key.q,
            mdeg: key.mdeg,
            prime: key.prime,
            rank,
        }
    }

    pub fn key(&self) -> CacheKey {
        CacheKey {
            n: self.n,
            d: self.d,
            b: self.b,
            p: self.p,
            q: self.q,
            mdeg: self.mdeg.clone(),
            prime: self.prime,
        }
    }
}

/// Block ranks in memory, optionally backed by a JSON-lines file.
#[derive(Debug, Default)]
pub struct BlockCache {
    path: Option<PathBuf>,
    ranks: RwLock<HashMap<CacheKey, u64>>,
    writer: Mutex<Option<File>>,
}

impl BlockCache {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Opens (creating if needed) the cache in `dir` and loads every record.
    pub fn open(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        let path = dir.join(CACHE_FILE);
        let (records, bad) = read_records(&path)?;
        if !bad.is_empty() {
            quarantine(dir, &path, &records, &bad)?;
        }
        let mut ranks = HashMap::with_capacity(records.len());
        for r in records {
            let key = r.key();
            match ranks.get(&key) {
                Some(&old) if old != r.rank => {
                    return Err(Error::Cache(format!(
                        "conflicting ranks {old} and {} for {key:?} in {}",
                        r.rank,
                        path.display()
                    )))
                }
                _ => {
                    ranks.insert(key, r.rank);
                }
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok(Self {
            path: Some(path),
            ranks: RwLock::new(ranks),
            writer: Mutex::new(Some(file)),
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn get(&self, key: &CacheKey) -> Option<u64> {
        self.ranks.read().expect("cache lock").get(key).copied()
    }

    pub fn len(&self) -> usize {
        self.ranks.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Adds records whose keys are new, appending them in the given order.
    /// Returns how many were new.
    pub fn insert_all(&self, records: &[BlockCacheRecord]) -> Result<usize> {
        let mut fresh = Vec::new();
        {
            let mut ranks = self.ranks.write().expect("cache lock");
            for r in records {
                let key = r.key();
                match ranks.get(&key) {
                    Some(&old) if old != r.rank => {
                        return Err(Error::Cache(format!(
                            "rank {} for {key:?} disagrees with cached {old}",
                            r.rank
                        )))
                    }
                    Some(_) => {}
                    None => {
                        ranks.insert(key, r.rank);
                        fresh.push(r);
                    }
                }
            }
        }
        let mut writer = self.writer.lock().expect("cache writer lock");
        if let Some(file) = writer.as_mut() {
            let mut buf = Vec::new();
            for r in &fresh {
                serde_json::to_writer(&mut buf, r)?;
                buf.push(b'\n');
            }
            file.write_all(&buf)?;
            file.flush()?;
        }
        Ok(fresh.len())
    }
}

type BadLine = (usize, String, String);

fn read_records(path: &Path) -> Result<(Vec<BlockCacheRecord>, Vec<BadLine>)> {
    let mut good = Vec::new();
    let mut bad = Vec::new();
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok((good, bad)),
        Err(e) => return Err(e.into()),
    };
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<BlockCacheRecord>(&line) {
            Ok(r) => good.push(r),
            Err(e) => bad.push((i + 1, line, e.to_string())),
        }
    }
    Ok((good, bad))
}

/// Moves unreadable lines to the quarantine file and rewrites the cache without them.
fn quarantine(dir: &Path, path: &Path, good: &[BlockCacheRecord], bad: &[BadLine]) -> Result<()> {
    let mut q = OpenOptions::new()
        .create(true)
        .append(true)
        .open(dir.join(QUARANTINE_FILE))?;
    for (line_no, line, err) in bad {
        log::warn!(
            "{}:{line_no}: unreadable cache record quarantined ({err})",
            path.display()
        );
        let entry = serde_json::json!({ "line": line_no, "error": err, "raw": line });
        writeln!(q, "{entry}")?;
    }
    q.flush()?;
    write_atomically(path, good)
}

fn write_atomically(path: &Path, records: &[BlockCacheRecord]) -> Result<()> {
    let tmp = path.with_extension("jsonl.tmp");
    {
        let mut f = File::create(&tmp)?;
        let mut buf = Vec::new();
        for r in records {
            serde_json::to_writer(&mut buf, r)?;
            buf.push(b'\n');
        }
        f.write_all(&buf)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Record counts for one `(n, d, b, prime)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupCount {
    pub n: u32,
    pub d: u32,
    pub b: i64,
    pub prime: u32,
    pub records: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CacheStats {
    pub records: usize,
    pub quarantined: usize,
    pub groups: Vec<GroupCount>,
}

/// Counts records per `(n, d, b, prime)`. Unreadable lines are quarantined first.
pub fn cache_stats(dir: &Path) -> Result<CacheStats> {
    if !dir.is_dir() {
        return Err(Error::Cache(format!("{} is not a directory", dir.display())));
    }
    let path = dir.join(CACHE_FILE);
    let (records, bad) = read_records(&path)?;
    if !bad.is_empty() {
        quarantine(dir, &path, &records, &bad)?;
    }
    let mut groups: BTreeMap<(u32, u32, i64, u32), usize> = BTreeMap::new();
    for r in &records {
        *groups.entry((r.n, r.d, r.b, r.prime)).or_insert(0) += 1;
    }
    Ok(CacheStats {
        records: records.len(),
        quarantined: count_lines(&dir.join(QUARANTINE_FILE))?,
        groups: groups
            .into_iter()
            .map(|((n, d, b, prime), records)| GroupCount { n, d, b, prime, records })
            .collect(),
    })
}

fn count_lines(path: &Path) -> Result<usize> {
    match fs::read_to_string(path) {
        Ok(s) => Ok(s.lines().filter(|l| !l.trim().is_empty()).count()),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(0),
        Err(e) => Err(e.into()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GcSummary {
    pub before: usize,
    pub after: usize,
    pub dropped_primes: usize,
    pub duplicates: usize,
}

/// Rewrites the cache keeping only records whose prime is in `keep`, dropping
/// duplicate keys (first occurrence wins) and preserving order otherwise.
pub fn cache_gc(dir: &Path, keep: &[u32]) -> Result<GcSummary> {
    let path = dir.join(CACHE_FILE);
    let (records, bad) = read_records(&path)?;
    if !bad.is_empty() {
        quarantine(dir, &path, &records, &bad)?;
    }
    let keep: HashSet<u32> = keep.iter().copied().collect();
    let before = records.len();
    let mut seen = HashSet::new();
    let mut dropped_primes = 0;
    let mut duplicates = 0;
    let mut kept = Vec::with_capacity(before);
    for r in records {
        if !keep.contains(&r.prime) {
            dropped_primes += 1;
        } else if !seen.insert(r.key()) {
            duplicates += 1;
        } else {
            kept.push(r);
        }
    }
    if path.exists() {
        write_atomically(&path, &kept)?;
    }
    Ok(GcSummary {
        before,
        after: kept.len(),
        dropped_primes,
        duplicates,
    })
}
