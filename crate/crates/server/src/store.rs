//! Embedded record store: an in-memory map made durable by a write-ahead log.
//!
//! Layout of a data directory:
//!
//! ```text
//! LOCK            exclusive lock held by the writing process
//! snapshot.json   optional checkpoint: "<sha256> <canonical json>"
//! wal.log         one committed batch per line: "<sha256> <canonical json>"
//! ```
//!
//! A batch is acknowledged only after its line has been written and synced.
//! On open, a trailing line with no newline is an unacknowledged write cut
//! short by a crash and is discarded; any complete line whose checksum does not
//! match refuses the open with [`StoreError::Corruption`].

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

const WAL: &str = "wal.log";
const SNAPSHOT: &str = "snapshot.json";
const LOCK: &str = "LOCK";

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("store corruption in {file} line {line}: {reason}")]
    Corruption { file: String, line: usize, reason: String },
    #[error("version conflict on {kind}/{id}: expected {expected}, found {actual}")]
    Conflict { kind: String, id: String, expected: u64, actual: u64 },
    #[error("data directory {0} is locked by another process")]
    Locked(PathBuf),
    #[error("store opened read-only")]
    ReadOnly,
}

pub type StoreResult<T> = Result<T, StoreError>;

/// Serializes with sorted keys, UTF-8 and no insignificant whitespace.
pub fn canonical_json(v: &Value) -> String {
    // serde_json's default map type is ordered, so keys come out sorted.
    serde_json::to_string(v).expect("json values always serialize")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoredRecord {
    pub kind: String,
    pub id: String,
    pub version: u64,
    pub payload: Value,
}

impl StoredRecord {
    /// One export line: `{"id":..,"kind":..,"payload":{..},"version":..}`.
    pub fn to_line(&self) -> String {
        canonical_json(&serde_json::to_value(self).expect("records serialize"))
    }
}

/// A write against one record. `expected` is the version the writer last saw;
/// 0 means "must not exist".
#[derive(Debug, Clone, PartialEq)]
pub enum Op {
    Put { kind: String, id: String, expected: u64, payload: Value },
    Delete { kind: String, id: String, expected: u64 },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
enum LoggedOp {
    Put { kind: String, id: String, version: u64, payload: Value },
    Del { kind: String, id: String },
}

#[derive(Serialize, Deserialize)]
struct Batch {
    seq: u64,
    ops: Vec<LoggedOp>,
}

#[derive(Serialize, Deserialize)]
struct Snapshot {
    seq: u64,
    records: Vec<StoredRecord>,
}

type Key = (String, String);

#[derive(Debug)]
pub struct Store {
    dir: PathBuf,
    wal: Option<File>,
    _lock: Option<File>,
    seq: u64,
    records: BTreeMap<Key, StoredRecord>,
}

fn corruption(file: &str, line: usize, reason: impl Into<String>) -> StoreError {
    StoreError::Corruption { file: file.to_owned(), line, reason: reason.into() }
}

/// Splits `"<hex> <json>"` and verifies the checksum.
fn checked_payload<'a>(file: &str, n: usize, line: &'a str) -> StoreResult<&'a str> {
    let (sum, json) = line.split_once(' ').ok_or_else(|| corruption(file, n, "missing checksum"))?;
    if sha256_hex(json.as_bytes()) != sum {
        return Err(corruption(file, n, "checksum mismatch"));
    }
    Ok(json)
}

fn framed(json: &str) -> String {
    format!("{} {}\n", sha256_hex(json.as_bytes()), json)
}

fn sync_dir(dir: &Path) -> io::Result<()> {
    File::open(dir)?.sync_all()
}

impl Store {
    /// Opens (creating if needed) a writable store, discarding a torn tail.
    pub fn open(dir: impl AsRef<Path>) -> StoreResult<Self> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir)?;
        let lock = OpenOptions::new().create(true).truncate(false).write(true).open(dir.join(LOCK))?;
        match lock.try_lock() {
            Ok(()) => {}
            Err(fs::TryLockError::WouldBlock) => return Err(StoreError::Locked(dir)),
            Err(fs::TryLockError::Error(e)) => return Err(e.into()),
        }
        let mut store = Store::load(dir, true)?;
        store._lock = Some(lock);
        Ok(store)
    }

    /// Opens an existing store without locking or repairing it. A torn tail
    /// is ignored rather than truncated.
    pub fn open_read_only(dir: impl AsRef<Path>) -> StoreResult<Self> {
        Store::load(dir.as_ref().to_path_buf(), false)
    }

    fn load(dir: PathBuf, writable: bool) -> StoreResult<Self> {
        let mut store = Store { dir, wal: None, _lock: None, seq: 0, records: BTreeMap::new() };
        store.load_snapshot()?;
        let good_len = store.replay_wal()?;
        if writable {
            let wal = OpenOptions::new().create(true).append(true).read(true).open(store.dir.join(WAL))?;
            if wal.metadata()?.len() != good_len {
                wal.set_len(good_len)?;
                wal.sync_all()?;
            }
            sync_dir(&store.dir)?;
            store.wal = Some(wal);
        }
        Ok(store)
    }

    fn load_snapshot(&mut self) -> StoreResult<()> {
        let path = self.dir.join(SNAPSHOT);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(()),
            Err(e) => return Err(e.into()),
        };
        let line = text.strip_suffix('\n').ok_or_else(|| corruption(SNAPSHOT, 1, "truncated snapshot"))?;
        let json = checked_payload(SNAPSHOT, 1, line)?;
        let snap: Snapshot = serde_json::from_str(json).map_err(|e| corruption(SNAPSHOT, 1, e.to_string()))?;
        self.seq = snap.seq;
        for r in snap.records {
            self.records.insert((r.kind.clone(), r.id.clone()), r);
        }
        Ok(())
    }

    /// Applies every complete WAL line; returns the byte length of that prefix.
    fn replay_wal(&mut self) -> StoreResult<u64> {
        let mut bytes = Vec::new();
        match File::open(self.dir.join(WAL)) {
            Ok(mut f) => {
                f.read_to_end(&mut bytes)?;
            }
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(0),
            Err(e) => return Err(e.into()),
        }
        let complete = bytes.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
        let text = std::str::from_utf8(&bytes[..complete]).map_err(|e| corruption(WAL, 0, e.to_string()))?;
        for (i, line) in text.lines().enumerate() {
            let n = i + 1;
            let json = checked_payload(WAL, n, line)?;
            let batch: Batch = serde_json::from_str(json).map_err(|e| corruption(WAL, n, e.to_string()))?;
            if batch.seq <= self.seq {
                // Already folded into the snapshot.
                continue;
            }
            if batch.seq != self.seq + 1 {
                return Err(corruption(WAL, n, format!("sequence gap: {} after {}", batch.seq, self.seq)));
            }
            for op in batch.ops {
                self.apply_logged(op).map_err(|reason| corruption(WAL, n, reason))?;
            }
            self.seq = batch.seq;
        }
        Ok(complete as u64)
    }

    fn apply_logged(&mut self, op: LoggedOp) -> Result<(), String> {
        match op {
            LoggedOp::Put { kind, id, version, payload } => {
                let current = self.version(&kind, &id);
                if version != current + 1 {
                    return Err(format!("{kind}/{id} version {version} after {current}"));
                }
                self.records.insert((kind.clone(), id.clone()), StoredRecord { kind, id, version, payload });
            }
            LoggedOp::Del { kind, id } => {
                self.records.remove(&(kind, id));
            }
        }
        Ok(())
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Sequence number of the last committed batch.
    pub fn seq(&self) -> u64 {
        self.seq
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn get(&self, kind: &str, id: &str) -> Option<&StoredRecord> {
        self.records.get(&(kind.to_owned(), id.to_owned()))
    }

    /// Current version of a record; 0 when absent.
    pub fn version(&self, kind: &str, id: &str) -> u64 {
        self.get(kind, id).map_or(0, |r| r.version)
    }

    /// All records ordered by (kind, id).
    pub fn records(&self) -> impl Iterator<Item = &StoredRecord> {
        self.records.values()
    }

    /// Checks every expected version, then appends and syncs one batch, then
    /// applies it. Nothing is written if any check fails.
    pub fn commit(&mut self, ops: Vec<Op>) -> StoreResult<u64> {
        if ops.is_empty() {
            return Ok(self.seq);
        }
        let mut staged: BTreeMap<Key, u64> = BTreeMap::new();
        let mut logged = Vec::with_capacity(ops.len());
        for op in ops {
            let (kind, id, expected) = match &op {
                Op::Put { kind, id, expected, .. } | Op::Delete { kind, id, expected } => (kind, id, *expected),
            };
            let key = (kind.clone(), id.clone());
            let actual = staged.get(&key).copied().unwrap_or_else(|| self.version(kind, id));
            if actual != expected {
                return Err(StoreError::Conflict { kind: kind.clone(), id: id.clone(), expected, actual });
            }
            match op {
                Op::Put { kind, id, payload, .. } => {
                    staged.insert(key, expected + 1);
                    logged.push(LoggedOp::Put { kind, id, version: expected + 1, payload });
                }
                Op::Delete { kind, id, .. } => {
                    staged.insert(key, 0);
                    logged.push(LoggedOp::Del { kind, id });
                }
            }
        }
        let batch = Batch { seq: self.seq + 1, ops: logged };
        let json = canonical_json(&serde_json::to_value(&batch).expect("batches serialize"));
        let wal = self.wal.as_mut().ok_or(StoreError::ReadOnly)?;
        wal.write_all(framed(&json).as_bytes())?;
        wal.sync_data()?;
        for op in batch.ops {
            self.apply_logged(op).expect("versions checked before logging");
        }
        self.seq = batch.seq;
        Ok(self.seq)
    }

    /// Writes every record to a fresh snapshot and empties the log.
    pub fn checkpoint(&mut self) -> StoreResult<()> {
        if self.wal.is_none() {
            return Err(StoreError::ReadOnly);
        }
        let snap = Snapshot { seq: self.seq, records: self.records.values().cloned().collect() };
        let json = canonical_json(&serde_json::to_value(&snap).expect("snapshots serialize"));
        let tmp = self.dir.join("snapshot.json.tmp");
        {
            let mut f = File::create(&tmp)?;
            f.write_all(framed(&json).as_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, self.dir.join(SNAPSHOT))?;
        sync_dir(&self.dir)?;
        let wal = self.wal.as_mut().expect("checked above");
        wal.set_len(0)?;
        wal.sync_all()?;
        Ok(())
    }

    /// Export lines sorted by (kind, id), one record per line, each ending in `\n`.
    pub fn export(&self) -> String {
        self.records().map(|r| r.to_line() + "\n").collect()
    }
}
