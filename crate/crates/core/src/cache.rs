//! On-disk cache of semifree replacements, keyed by a SHA-256 hash of the
//! module, its algebra and the window. Entries carry a digest of their own
//! payload and are re-certified when read.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dg::semifree::morphism_from_free;
use crate::dg::{DgModule, Generator, HomologyAlgebra, SemifreeModule};
use crate::error::{Error, Result};
use crate::io::{AlgebraSpec, ModuleSpec};
use crate::linalg::Vector;
use crate::resolution::replace::certify;
use crate::resolution::{semifree_replace_with, SemifreeReplacement};

pub const ENV_VAR: &str = "DGTOR_CACHE_DIR";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct Payload {
    algebra: AlgebraSpec,
    module: ModuleSpec,
    window: i32,
    generators: Vec<Generator>,
    values: Vec<Vector>,
    valid_to: i32,
    reduced: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct Entry {
    key: String,
    digest: String,
    payload: Payload,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryInfo {
    pub key: String,
    pub digest: String,
    pub window: i32,
    pub generators: usize,
    pub bytes: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyOutcome {
    pub key: String,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub problem: Option<String>,
    pub evicted: bool,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn key_of(m: &DgModule, window: i32) -> Result<(String, AlgebraSpec, ModuleSpec)> {
    let algebra = AlgebraSpec::from_algebra(m.algebra(), Vec::new());
    let module = ModuleSpec::from_module("", m, Vec::new());
    let text = serde_json::to_string(&(&algebra, &module, window))?;
    Ok((sha256_hex(text.as_bytes()), algebra, module))
}

/// Rebuild and re-certify a stored replacement.
fn restore(p: &Payload) -> Result<(DgModule, SemifreeReplacement)> {
    let a = std::sync::Arc::new(p.algebra.build()?);
    let m = p.module.build(&a)?;
    let mut free = SemifreeModule::new(a);
    for g in &p.generators {
        free.attach(g.degree, g.boundary.clone())?;
    }
    if p.values.len() != free.len() {
        return Err(Error::Input("stored values do not match the generators".into()));
    }
    let (module, layout) = free.to_module(Some(p.valid_to + 1));
    let quasi_iso = morphism_from_free(&free, &layout, module.complex(), &m, &p.values)?;
    let r = SemifreeReplacement {
        free,
        values: p.values.clone(),
        valid_to: p.valid_to,
        reduced: p.reduced,
        log: Vec::new(),
        module,
        layout,
        quasi_iso,
    };
    certify(&r, &m)?;
    Ok((m, r))
}

fn check_entry(text: &str, key: &str) -> Result<Entry> {
    let e: Entry = serde_json::from_str(text)?;
    if e.key != key {
        return Err(Error::Input(format!("entry is stored under {key} but claims key {}", e.key)));
    }
    let digest = sha256_hex(serde_json::to_string(&e.payload)?.as_bytes());
    if digest != e.digest {
        return Err(Error::Input("payload digest mismatch".into()));
    }
    Ok(e)
}

#[derive(Clone, Debug)]
pub struct ResolutionCache {
    dir: PathBuf,
}

impl ResolutionCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        ResolutionCache { dir: dir.into() }
    }

    /// `$DGTOR_CACHE_DIR`, else `$XDG_CACHE_HOME/dgtor`, else `~/.cache/dgtor`.
    pub fn from_env() -> Self {
        let dir = std::env::var_os(ENV_VAR)
            .map(PathBuf::from)
            .or_else(|| std::env::var_os("XDG_CACHE_HOME").map(|d| PathBuf::from(d).join("dgtor")))
            .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache").join("dgtor")))
            .unwrap_or_else(|| PathBuf::from(".dgtor-cache"));
        Self::new(dir)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    fn keys(&self) -> Result<Vec<String>> {
        if !self.dir.exists() {
            return Ok(Vec::new());
        }
        let mut keys: Vec<String> = fs::read_dir(&self.dir)?
            .filter_map(|e| e.ok())
            .filter_map(|e| e.file_name().to_str()?.strip_suffix(".json").map(str::to_owned))
            .collect();
        keys.sort();
        Ok(keys)
    }

    /// The replacement of `m`, read from disk when a valid entry exists and
    /// computed and stored otherwise. A corrupted entry is replaced.
    pub fn replacement(&self, m: &DgModule, window: i32, ha: &HomologyAlgebra) -> Result<SemifreeReplacement> {
        let (key, algebra, module) = key_of(m, window)?;
        let path = self.path(&key);
        if let Ok(text) = fs::read_to_string(&path) {
            if let Ok(e) = check_entry(&text, &key) {
                if let Ok((stored, r)) = restore(&e.payload) {
                    if &stored == m {
                        return Ok(r);
                    }
                }
            }
            fs::remove_file(&path)?;
        }
        let r = semifree_replace_with(m, window, ha)?;
        let payload = Payload {
            algebra,
            module,
            window,
            generators: r.free.generators().to_vec(),
            values: r.values.clone(),
            valid_to: r.valid_to,
            reduced: r.reduced,
        };
        let digest = sha256_hex(serde_json::to_string(&payload)?.as_bytes());
        let text = serde_json::to_string(&Entry { key: key.clone(), digest, payload })?;
        fs::create_dir_all(&self.dir)?;
        // identical content under an identical name, so a concurrent writer is harmless
        let tmp = self.dir.join(format!("{key}.{}.tmp", std::process::id()));
        fs::write(&tmp, text)?;
        fs::rename(&tmp, &path)?;
        Ok(r)
    }

    pub fn list(&self) -> Result<Vec<EntryInfo>> {
        let mut out = Vec::new();
        for key in self.keys()? {
            let path = self.path(&key);
            let bytes = fs::metadata(&path)?.len();
            let info = match fs::read_to_string(&path).ok().and_then(|t| serde_json::from_str::<Entry>(&t).ok()) {
                Some(e) => EntryInfo { key, digest: e.digest, window: e.payload.window, generators: e.payload.generators.len(), bytes },
                None => EntryInfo { key, digest: String::new(), window: -1, generators: 0, bytes },
            };
            out.push(info);
        }
        Ok(out)
    }

    /// Re-check every entry; entries failing any check are deleted.
    pub fn verify(&self) -> Result<Vec<VerifyOutcome>> {
        let mut out = Vec::new();
        for key in self.keys()? {
            let path = self.path(&key);
            let checked = fs::read_to_string(&path)
                .map_err(Error::from)
                .and_then(|t| check_entry(&t, &key))
                .and_then(|e| restore(&e.payload).map(|_| ()));
            match checked {
                Ok(()) => out.push(VerifyOutcome { key, ok: true, problem: None, evicted: false }),
                Err(e) => {
                    fs::remove_file(&path)?;
                    out.push(VerifyOutcome { key, ok: false, problem: Some(e.to_string()), evicted: true });
                }
            }
        }
        Ok(out)
    }

    /// Remove every entry, returning how many were removed.
    pub fn clear(&self) -> Result<usize> {
        let keys = self.keys()?;
        for key in &keys {
            fs::remove_file(self.path(key))?;
        }
        Ok(keys.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dg::{examples, homology_algebra};

    #[test]
    fn store_list_verify_clear() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ResolutionCache::new(dir.path());
        assert!(cache.list().unwrap().is_empty());
        let a = examples::dual_numbers();
        let ha = homology_algebra(&a).unwrap();
        let k = examples::residue_module(&a);
        let first = cache.replacement(&k, 4, &ha).unwrap();
        let again = cache.replacement(&k, 4, &ha).unwrap();
        assert_eq!(first.free, again.free);
        assert_eq!(cache.list().unwrap().len(), 1);
        assert!(cache.verify().unwrap().iter().all(|v| v.ok));
        assert_eq!(cache.clear().unwrap(), 1);
        assert!(cache.list().unwrap().is_empty());
    }

    #[test]
    fn corrupted_entry_is_evicted() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ResolutionCache::new(dir.path());
        let a = examples::dual_numbers();
        let ha = homology_algebra(&a).unwrap();
        cache.replacement(&examples::residue_module(&a), 3, &ha).unwrap();
        let key = &cache.list().unwrap()[0].key;
        let path = cache.path(key);
        let mut bytes = fs::read(&path).unwrap();
        let at = bytes.iter().rposition(|&b| b == b'1').unwrap();
        bytes[at] = b'2';
        fs::write(&path, bytes).unwrap();
        let v = cache.verify().unwrap();
        assert!(!v[0].ok && v[0].evicted, "{v:?}");
        assert!(cache.list().unwrap().is_empty());
    }
}
