//! Append-only JSON-lines cache of goal values.
//!
//! Entries are keyed by the complementation-canonical form of the function,
//! so `f`, `¬f` and every input-complemented variant share one record. `Γ`
//! is unchanged by those maps; output negation exchanges `Γ⁰` and `Γ¹`,
//! which [`CacheKey::of`] tracks. Input permutations are not folded in.

use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use goalval_core::boolfn::{c_canonical, TruthTable};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Environment variable that overrides the cache location.
pub const CACHE_ENV: &str = "GOALVAL_CACHE";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Ilp,
    ReadonceFormula,
    ConstructionBound,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CacheKey {
    pub n: usize,
    pub hex: String,
}

impl CacheKey {
    /// Key of `f`, and whether reaching it negated the output.
    pub fn of(f: &TruthTable) -> (CacheKey, bool) {
        let c = c_canonical(f);
        let negated = !(0..f.len()).any(|m| f.complement_inputs(m) == c);
        (CacheKey { n: f.n(), hex: c.to_hex() }, negated)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: CacheKey,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma0: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma1: Option<u64>,
    /// Certified `[lower, upper]` for `Γ` when it is not known exactly.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<(u64, u64)>,
    pub provenance: Provenance,
    pub created: u64,
    pub updated: u64,
}

/// Values for one function as seen from `f` (not from the canonical form).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Known {
    pub gamma: Option<(u64, Provenance)>,
    pub gamma0: Option<(u64, Provenance)>,
    pub gamma1: Option<(u64, Provenance)>,
    pub bounds: Option<(u64, u64)>,
}

pub struct Cache {
    path: PathBuf,
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

impl Cache {
    pub fn at(path: impl Into<PathBuf>) -> Self {
        Self { path: path.into() }
    }

    /// `$GOALVAL_CACHE`, else `$XDG_CACHE_HOME/goalval/cache.jsonl`, else
    /// `$HOME/.cache/goalval/cache.jsonl`.
    pub fn default_path() -> PathBuf {
        if let Some(p) = std::env::var_os(CACHE_ENV) {
            return PathBuf::from(p);
        }
        let base = std::env::var_os("XDG_CACHE_HOME")
            .map(PathBuf::from)
            .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache")))
            .unwrap_or_else(std::env::temp_dir);
        base.join("goalval").join("cache.jsonl")
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    fn open(&self) -> Result<File> {
        if let Some(dir) = self.path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        Ok(OpenOptions::new().read(true).append(true).create(true).open(&self.path)?)
    }

    fn read_all(file: &File) -> Result<Vec<CacheEntry>> {
        let mut out = Vec::new();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let e = serde_json::from_str(&line)
                .map_err(|e| CliError::Cache(format!("line {}: {e}", i + 1)))?;
            out.push(e);
        }
        Ok(out)
    }

    pub fn entries(&self) -> Result<Vec<CacheEntry>> {
        if !self.path.exists() {
            return Ok(Vec::new());
        }
        let file = File::open(&self.path)?;
        file.lock_shared()?;
        Self::read_all(&file)
    }

    /// Everything recorded for `f`, exact values first by provenance order
    /// `ilp`, `readonce-formula`.
    pub fn lookup(&self, f: &TruthTable) -> Result<Known> {
        let (key, negated) = CacheKey::of(f);
        let mut known = Known::default();
        for e in self.entries()?.into_iter().filter(|e| e.key == key) {
            let (g0, g1) = if negated { (e.gamma1, e.gamma0) } else { (e.gamma0, e.gamma1) };
            let p = e.provenance;
            known.gamma = known.gamma.or(e.gamma.map(|v| (v, p)));
            known.gamma0 = known.gamma0.or(g0.map(|v| (v, p)));
            known.gamma1 = known.gamma1.or(g1.map(|v| (v, p)));
            if let Some((lo, hi)) = e.bounds {
                known.bounds = Some(match known.bounds {
                    Some((a, b)) => (a.max(lo), b.min(hi)),
                    None => (lo, hi),
                });
            }
        }
        Ok(known)
    }

    /// Appends a record for `f` after checking it against every exact value
    /// already stored for the same key.
    pub fn record(
        &self,
        f: &TruthTable,
        provenance: Provenance,
        gamma: Option<u64>,
        gamma0: Option<u64>,
        gamma1: Option<u64>,
        bounds: Option<(u64, u64)>,
    ) -> Result<CacheEntry> {
        let (key, negated) = CacheKey::of(f);
        let (gamma0, gamma1) = if negated { (gamma1, gamma0) } else { (gamma0, gamma1) };
        let mut file = self.open()?;
        file.lock()?;
        let existing = Self::read_all(&file)?;
        let mut created = now();
        for e in existing.iter().filter(|e| e.key == key) {
            for (name, old, new) in [("gamma", e.gamma, gamma), ("gamma0", e.gamma0, gamma0), ("gamma1", e.gamma1, gamma1)] {
                if let (Some(a), Some(b)) = (old, new) {
                    if a != b {
                        return Err(CliError::Cache(format!(
                            "{name} {b} from {provenance:?} disagrees with stored {a} from {:?}",
                            e.provenance
                        )));
                    }
                }
            }
            if e.provenance == provenance {
                created = created.min(e.created);
            }
        }
        let entry = CacheEntry {
            key,
            gamma,
            gamma0,
            gamma1,
            bounds,
            provenance,
            created,
            updated: now(),
        };
        let mut line = serde_json::to_string(&entry)?;
        line.push('\n');
        file.write_all(line.as_bytes())?;
        file.flush()?;
        Ok(entry)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use goalval_core::boolfn::Family;

    #[test]
    fn round_trip_and_negation() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::at(dir.path().join("c.jsonl"));
        let and2 = Family::And.build(2).unwrap();
        cache.record(&and2, Provenance::Ilp, Some(2), Some(1), Some(2), None).unwrap();
        let k = cache.lookup(&and2).unwrap();
        assert_eq!(k.gamma, Some((2, Provenance::Ilp)));
        assert_eq!((k.gamma0, k.gamma1), (Some((1, Provenance::Ilp)), Some((2, Provenance::Ilp))));
        // ~AND is x1 nand x2: Γ⁰ and Γ¹ swap
        let nand = and2.negate();
        let k = cache.lookup(&nand).unwrap();
        assert_eq!((k.gamma0.unwrap().0, k.gamma1.unwrap().0), (2, 1));
        // OR is AND with every input and the output complemented
        let k = cache.lookup(&Family::Or.build(2).unwrap()).unwrap();
        assert_eq!((k.gamma0.unwrap().0, k.gamma1.unwrap().0), (2, 1));
        assert!(cache.record(&nand, Provenance::ReadonceFormula, Some(3), None, None, None).is_err());
        cache.record(&nand, Provenance::ReadonceFormula, Some(2), None, None, None).unwrap();
        assert_eq!(cache.entries().unwrap().len(), 2);
    }
}
