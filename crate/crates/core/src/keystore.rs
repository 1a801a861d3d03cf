//! Durable one-time key store.
//!
//! Every state change is appended to a journal and fsynced before it takes
//! effect in memory. The journal starts with `MTAOJNL1`, a length-prefixed
//! engine id, and then holds framed records:
//!
//! ```text
//! [len: u32][!len: u32][crc32(payload): u32][payload: len bytes]
//! ```
//!
//! Payload kinds are `Stored { entry_id, key }` and
//! `Used { entry_id, timestamp, sha256(message), signature }`. Keeping the
//! signature in the `Used` record means a key that is consumed on disk always
//! has a recoverable signature, even when the process died before handing
//! it out.
//!
//! A damaged final record (torn write or checksum failure) is dropped with a
//! warning. Damage anywhere else is [`KeystoreError::CorruptJournal`].

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions, TryLockError};
use std::io::{self, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Mutex, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::codec::{CodecError, Envelope};
use crate::engine::{PairingEngine, PairingGroups};
use crate::scheme::{self, SchemeError, Signature, SignerKey, TaRecord};

pub const JOURNAL_MAGIC: &[u8; 8] = b"MTAOJNL1";
/// Environment variable naming the default store path.
pub const STORE_ENV: &str = "MTAO_STORE";

const FRAME_HEADER: usize = 12;
const KIND_STORED: u8 = 1;
const KIND_USED: u8 = 2;

#[derive(Debug, Error)]
pub enum KeystoreError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("journal {0} is locked by another writer")]
    Locked(PathBuf),
    #[error("corrupt journal at byte {offset}: {reason}")]
    CorruptJournal { offset: u64, reason: String },
    #[error("journal belongs to backend {found}, expected {expected}")]
    BackendMismatch { expected: String, found: String },
    #[error("a fresh key for this identity and TA already exists (entry {existing})")]
    DuplicateKey { existing: u64 },
    #[error("entry {0} has already been used")]
    KeyAlreadyUsed(u64),
    #[error("no entry {0}")]
    KeyNotFound(u64),
    #[error("no store path given and {STORE_ENV} is not set")]
    NoPath,
    #[error("store handle is unusable after an injected crash")]
    Crashed,
    #[error("injected crash at {0:?}")]
    InjectedCrash(FaultPoint),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Codec(#[from] CodecError),
}

/// Where `sign_once` simulates a process crash. Test-only plumbing.
#[doc(hidden)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaultPoint {
    /// After signing, before anything reaches the journal.
    BeforePersist,
    /// Only the first `n` bytes of the `Used` record reach the journal.
    TornWrite(usize),
    /// After the `Used` record is durable, before the signature is returned.
    AfterPersist,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeyStatus {
    Fresh,
    Used,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Usage<P: PairingGroups> {
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    /// SHA-256 of the signed message, kept for audit.
    pub message_digest: [u8; 32],
    pub signature: Signature<P>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyEntry<P: PairingGroups> {
    pub entry_id: u64,
    pub key: SignerKey<P>,
    pub usage: Option<Usage<P>>,
}

impl<P: PairingGroups> KeyEntry<P> {
    pub fn status(&self) -> KeyStatus {
        if self.usage.is_some() {
            KeyStatus::Used
        } else {
            KeyStatus::Fresh
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Record<P: PairingGroups> {
    Stored { entry_id: u64, key: SignerKey<P> },
    Used { entry_id: u64, usage: Usage<P> },
}

impl<P: PairingGroups> Record<P> {
    fn encode(&self) -> Vec<u8> {
        let mut out = Vec::new();
        match self {
            Record::Stored { entry_id, key } => {
                out.push(KIND_STORED);
                out.extend_from_slice(&entry_id.to_be_bytes());
                out.extend_from_slice(&key.to_binary());
            }
            Record::Used { entry_id, usage } => {
                out.push(KIND_USED);
                out.extend_from_slice(&entry_id.to_be_bytes());
                out.extend_from_slice(&usage.timestamp.to_be_bytes());
                out.extend_from_slice(&usage.message_digest);
                out.extend_from_slice(&usage.signature.to_binary());
            }
        }
        out
    }

    fn decode(payload: &[u8]) -> Result<Self, String> {
        let (&kind, rest) = payload.split_first().ok_or("empty payload")?;
        let u64_at = |b: &[u8], at: usize| -> Result<u64, String> {
            b.get(at..at + 8)
                .map(|s| u64::from_be_bytes(s.try_into().expect("8 bytes")))
                .ok_or_else(|| "record too short".to_string())
        };
        let entry_id = u64_at(rest, 0)?;
        match kind {
            KIND_STORED => {
                let key = SignerKey::from_binary(&rest[8..]).map_err(|e| e.to_string())?;
                Ok(Record::Stored { entry_id, key })
            }
            KIND_USED => {
                let timestamp = u64_at(rest, 8)?;
                let digest = rest.get(16..48).ok_or("record too short")?;
                let signature = Signature::from_binary(&rest[48..]).map_err(|e| e.to_string())?;
                Ok(Record::Used {
                    entry_id,
                    usage: Usage { timestamp, message_digest: digest.try_into().expect("32 bytes"), signature },
                })
            }
            k => Err(format!("unknown record kind {k}")),
        }
    }

    fn frame(&self) -> Vec<u8> {
        let payload = self.encode();
        let len = payload.len() as u32;
        let mut out = Vec::with_capacity(FRAME_HEADER + payload.len());
        out.extend_from_slice(&len.to_be_bytes());
        out.extend_from_slice(&(!len).to_be_bytes());
        out.extend_from_slice(&crc32fast::hash(&payload).to_be_bytes());
        out.extend_from_slice(&payload);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct State<P: PairingGroups> {
    entries: BTreeMap<u64, KeyEntry<P>>,
}

impl<P: PairingGroups> Default for State<P> {
    fn default() -> Self {
        State { entries: BTreeMap::new() }
    }
}

impl<P: PairingGroups> State<P> {
    fn next_id(&self) -> u64 {
        self.entries.keys().next_back().map_or(1, |k| k + 1)
    }

    fn fresh_duplicate(&self, key: &SignerKey<P>) -> Option<u64> {
        self.entries
            .values()
            .find(|e| e.usage.is_none() && e.key.identity == key.identity && e.key.ta_fingerprint == key.ta_fingerprint)
            .map(|e| e.entry_id)
    }

    /// Applying a record that is already reflected in the state is a no-op,
    /// which makes replay idempotent.
    fn apply(&mut self, record: &Record<P>) -> Result<(), String> {
        match record {
            Record::Stored { entry_id, key } => match self.entries.get(entry_id) {
                Some(e) if &e.key == key => Ok(()),
                Some(_) => Err(format!("entry {entry_id} stored twice with different keys")),
                None => {
                    self.entries.insert(*entry_id, KeyEntry { entry_id: *entry_id, key: key.clone(), usage: None });
                    Ok(())
                }
            },
            Record::Used { entry_id, usage } => {
                let entry = self.entries.get_mut(entry_id).ok_or_else(|| format!("use of unknown entry {entry_id}"))?;
                match &entry.usage {
                    None => {
                        entry.usage = Some(usage.clone());
                        Ok(())
                    }
                    Some(u) if u == usage => Ok(()),
                    Some(_) => Err(format!("entry {entry_id} used twice")),
                }
            }
        }
    }
}

fn header(backend: &str) -> Vec<u8> {
    let mut out = JOURNAL_MAGIC.to_vec();
    out.extend_from_slice(&(backend.len() as u16).to_be_bytes());
    out.extend_from_slice(backend.as_bytes());
    out
}

fn corrupt(offset: usize, reason: impl Into<String>) -> KeystoreError {
    KeystoreError::CorruptJournal { offset: offset as u64, reason: reason.into() }
}

struct Parsed<P: PairingGroups> {
    records: Vec<Record<P>>,
    /// Length of the valid prefix; anything past it is a damaged tail.
    valid_len: usize,
}

fn parse_journal<P: PairingGroups>(bytes: &[u8]) -> Result<Parsed<P>, KeystoreError> {
    let fixed = JOURNAL_MAGIC.len() + 2;
    if bytes.len() < fixed || &bytes[..8] != JOURNAL_MAGIC {
        return Err(corrupt(0, "bad journal header"));
    }
    let id_len = u16::from_be_bytes([bytes[8], bytes[9]]) as usize;
    let found = bytes.get(fixed..fixed + id_len).ok_or_else(|| corrupt(0, "bad journal header"))?;
    if found != P::ID.as_bytes() {
        return Err(KeystoreError::BackendMismatch {
            expected: P::ID.into(),
            found: String::from_utf8_lossy(found).into_owned(),
        });
    }
    let mut at = fixed + id_len;
    let mut records = Vec::new();
    while at < bytes.len() {
        let rest = &bytes[at..];
        if rest.len() < FRAME_HEADER {
            break;
        }
        let len = u32::from_be_bytes(rest[0..4].try_into().expect("4 bytes"));
        let inv = u32::from_be_bytes(rest[4..8].try_into().expect("4 bytes"));
        if len != !inv {
            return Err(corrupt(at, "record length check failed"));
        }
        let end = FRAME_HEADER + len as usize;
        if rest.len() < end {
            break;
        }
        let crc = u32::from_be_bytes(rest[8..12].try_into().expect("4 bytes"));
        let payload = &rest[FRAME_HEADER..end];
        if crc32fast::hash(payload) != crc {
            if rest.len() == end {
                break;
            }
            return Err(corrupt(at, "record checksum mismatch"));
        }
        records.push(Record::decode(payload).map_err(|r| corrupt(at, r))?);
        at += end;
    }
    Ok(Parsed { records, valid_len: at.min(bytes.len()) })
}

fn replay<P: PairingGroups>(records: &[Record<P>]) -> Result<State<P>, String> {
    let mut state = State::default();
    for r in records {
        state.apply(r)?;
    }
    Ok(state)
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

/// A journal-backed store of one-time signer keys. Share across threads by
/// reference or inside an `Arc`.
pub struct KeyStore<P: PairingGroups> {
    path: PathBuf,
    state: RwLock<State<P>>,
    writer: Mutex<File>,
    fault: Mutex<Option<FaultPoint>>,
    crashed: AtomicBool,
}

impl<P: PairingGroups> std::fmt::Debug for KeyStore<P> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KeyStore").field("path", &self.path).finish_non_exhaustive()
    }
}

impl<P: PairingGroups> KeyStore<P> {
    /// Opens the journal at `path`, creating it if needed, and takes an
    /// exclusive lock on it for the lifetime of the handle.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, KeystoreError> {
        let path = path.as_ref().to_path_buf();
        let mut file = OpenOptions::new().read(true).write(true).create(true).truncate(false).open(&path)?;
        match file.try_lock() {
            Ok(()) => {}
            Err(TryLockError::WouldBlock) => return Err(KeystoreError::Locked(path)),
            Err(TryLockError::Error(e)) => return Err(e.into()),
        }
        let mut bytes = Vec::new();
        file.read_to_end(&mut bytes)?;
        if bytes.is_empty() {
            file.write_all(&header(P::ID))?;
            file.sync_all()?;
            bytes = header(P::ID);
        }
        let parsed = parse_journal::<P>(&bytes)?;
        if parsed.valid_len < bytes.len() {
            log::warn!(
                "journal {}: dropping {} bytes of damaged trailing record",
                path.display(),
                bytes.len() - parsed.valid_len
            );
            file.set_len(parsed.valid_len as u64)?;
            file.sync_all()?;
        }
        let state = replay(&parsed.records).map_err(|r| corrupt(parsed.valid_len, r))?;
        file.seek(SeekFrom::End(0))?;
        Ok(KeyStore {
            path,
            state: RwLock::new(state),
            writer: Mutex::new(file),
            fault: Mutex::new(None),
            crashed: AtomicBool::new(false),
        })
    }

    /// Opens `path` if given, otherwise the path in `MTAO_STORE`.
    pub fn open_default(path: Option<&Path>) -> Result<Self, KeystoreError> {
        match path {
            Some(p) => Self::open(p),
            None => Self::open(std::env::var_os(STORE_ENV).ok_or(KeystoreError::NoPath)?),
        }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    #[doc(hidden)]
    pub fn inject_fault(&self, point: Option<FaultPoint>) {
        *self.fault.lock().expect("fault lock") = point;
    }

    fn ensure_alive(&self) -> Result<(), KeystoreError> {
        if self.crashed.load(Ordering::SeqCst) {
            return Err(KeystoreError::Crashed);
        }
        Ok(())
    }

    fn append(file: &mut File, record: &Record<P>) -> Result<(), KeystoreError> {
        file.write_all(&record.frame())?;
        file.sync_data()?;
        Ok(())
    }

    /// Adds a fresh key and returns its entry id.
    pub fn store_key(&self, key: SignerKey<P>) -> Result<u64, KeystoreError> {
        let mut file = self.writer.lock().expect("writer lock");
        self.ensure_alive()?;
        let entry_id = {
            let state = self.state.read().expect("state lock");
            if let Some(existing) = state.fresh_duplicate(&key) {
                return Err(KeystoreError::DuplicateKey { existing });
            }
            state.next_id()
        };
        let record = Record::Stored { entry_id, key };
        Self::append(&mut file, &record)?;
        self.state.write().expect("state lock").apply(&record).expect("checked above");
        Ok(entry_id)
    }

    /// Signs `message` with entry `entry_id` and marks it used. The `Used`
    /// record is durable before the signature is returned.
    pub fn sign_once<E: PairingEngine<Groups = P>>(
        &self,
        engine: &E,
        entry_id: u64,
        ta: &TaRecord<P>,
        message: &[u8],
    ) -> Result<Signature<P>, KeystoreError> {
        // Cheap early exit for losers of a race; the decision is re-made
        // under the writer lock.
        self.check_fresh(entry_id)?;
        let mut file = self.writer.lock().expect("writer lock");
        self.ensure_alive()?;
        let key = self.check_fresh(entry_id)?;
        let signature = scheme::sign(engine, &key, ta, message)?;
        let record = Record::Used {
            entry_id,
            usage: Usage { timestamp: now(), message_digest: Sha256::digest(message).into(), signature },
        };
        let fault = self.fault.lock().expect("fault lock").take();
        match fault {
            Some(FaultPoint::BeforePersist) => return Err(self.crash(FaultPoint::BeforePersist)),
            Some(FaultPoint::TornWrite(n)) => {
                let frame = record.frame();
                file.write_all(&frame[..n.min(frame.len().saturating_sub(1))])?;
                file.sync_data()?;
                return Err(self.crash(FaultPoint::TornWrite(n)));
            }
            _ => {}
        }
        Self::append(&mut file, &record)?;
        self.state.write().expect("state lock").apply(&record).expect("checked fresh under writer lock");
        if fault == Some(FaultPoint::AfterPersist) {
            return Err(self.crash(FaultPoint::AfterPersist));
        }
        Ok(signature)
    }

    fn crash(&self, point: FaultPoint) -> KeystoreError {
        self.crashed.store(true, Ordering::SeqCst);
        KeystoreError::InjectedCrash(point)
    }

    fn check_fresh(&self, entry_id: u64) -> Result<SignerKey<P>, KeystoreError> {
        let state = self.state.read().expect("state lock");
        let entry = state.entries.get(&entry_id).ok_or(KeystoreError::KeyNotFound(entry_id))?;
        if entry.usage.is_some() {
            return Err(KeystoreError::KeyAlreadyUsed(entry_id));
        }
        Ok(entry.key.clone())
    }

    pub fn entry(&self, entry_id: u64) -> Option<KeyEntry<P>> {
        self.state.read().expect("state lock").entries.get(&entry_id).cloned()
    }

    pub fn entries(&self) -> Vec<KeyEntry<P>> {
        self.state.read().expect("state lock").entries.values().cloned().collect()
    }

    pub fn status(&self, entry_id: u64) -> Option<KeyStatus> {
        self.entry(entry_id).map(|e| e.status())
    }

    /// The signature recorded when the entry was consumed.
    pub fn issued_signature(&self, entry_id: u64) -> Option<Signature<P>> {
        self.entry(entry_id).and_then(|e| e.usage.map(|u| u.signature))
    }
}

/// Reads a journal without locking it or repairing its tail, and returns the
/// entries it describes. For audits and tests.
pub fn inspect<P: PairingGroups>(path: impl AsRef<Path>) -> Result<Vec<KeyEntry<P>>, KeystoreError> {
    let bytes = std::fs::read(path)?;
    let parsed = parse_journal::<P>(&bytes)?;
    let state = replay(&parsed.records).map_err(|r| corrupt(parsed.valid_len, r))?;
    Ok(state.entries.into_values().collect())
}
