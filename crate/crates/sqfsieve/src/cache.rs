//! Append-only JSON-lines cache of local-density records.
//!
//! One file, `local_densities.jsonl`, per cache directory. Each line is a
//! self-contained record carrying `"schema":1`. Writers take an exclusive
//! lock on the file for the append, readers a shared one. Unreadable lines
//! are skipped with a warning.

use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sqfsieve_core::forms::parse_rational;
use sqfsieve_core::localdensity::{LocalDensityRecord, Method};
use sqfsieve_core::Family;

use crate::report::rational_string;
use crate::RunError;

pub const CACHE_FILE: &str = "local_densities.jsonl";
pub const SCHEMA: u32 = 1;

/// Cache key. Monte Carlo records are also keyed by sample count and seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CacheKey {
    pub family: Family,
    pub p: u64,
    pub method: Method,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
}

impl CacheKey {
    pub fn exact(family: Family, p: u64, method: Method) -> Self {
        CacheKey { family, p, method, samples: None, seed: None }
    }

    pub fn montecarlo(family: Family, p: u64, samples: u64, seed: u64) -> Self {
        CacheKey { family, p, method: Method::MonteCarlo, samples: Some(samples), seed: Some(seed) }
    }
}

/// On-disk form of a [`LocalDensityRecord`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheLine {
    pub schema: u32,
    pub family: String,
    pub p: u64,
    pub cp: String,
    pub strong: String,
    pub weak: String,
    pub method: String,
    pub ci: f64,
    pub samples: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl CacheLine {
    pub fn from_record(rec: &LocalDensityRecord, seed: Option<u64>) -> Self {
        CacheLine {
            schema: SCHEMA,
            family: rec.family.id().to_string(),
            p: rec.p,
            cp: rational_string(&rec.cp),
            strong: rational_string(&rec.strong),
            weak: rational_string(&rec.weak),
            method: rec.method.name().to_string(),
            ci: rec.ci,
            samples: rec.samples,
            seed,
        }
    }

    pub fn to_record(&self) -> Result<LocalDensityRecord, String> {
        if self.schema != SCHEMA {
            return Err(format!("schema {} is not supported", self.schema));
        }
        let family: Family = self.family.parse().map_err(|e| format!("{e}"))?;
        let method = Method::parse(&self.method).ok_or_else(|| format!("unknown method '{}'", self.method))?;
        let rat = |s: &str| parse_rational(s).map_err(|e| format!("{e}"));
        Ok(LocalDensityRecord {
            family,
            p: self.p,
            cp: rat(&self.cp)?,
            strong: rat(&self.strong)?,
            weak: rat(&self.weak)?,
            method,
            ci: self.ci,
            samples: self.samples,
        })
    }

    fn matches(&self, key: &CacheKey) -> bool {
        let fam_ok = self.family.parse::<Family>().map(|f| f == key.family).unwrap_or(false);
        let method_ok = Method::parse(&self.method) == Some(key.method);
        let mc_ok = key.method != Method::MonteCarlo
            || (key.samples == Some(self.samples) && key.seed == self.seed);
        fam_ok && method_ok && self.p == key.p && mc_ok
    }
}

#[derive(Debug, Clone)]
pub struct Cache {
    path: PathBuf,
}

impl Cache {
    pub fn open(dir: &Path) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Cache { path: dir.join(CACHE_FILE) })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    fn scan(file: &File, key: &CacheKey) -> io::Result<Option<LocalDensityRecord>> {
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parsed = serde_json::from_str::<CacheLine>(&line)
                .map_err(|e| e.to_string())
                .and_then(|l| if l.matches(key) { l.to_record().map(Some) } else { Ok(None) });
            match parsed {
                Ok(Some(rec)) => return Ok(Some(rec)),
                Ok(None) => {}
                Err(e) => log::warn!("skipping corrupt line {} of {CACHE_FILE}: {e}", i + 1),
            }
        }
        Ok(None)
    }

    pub fn lookup(&self, key: &CacheKey) -> io::Result<Option<LocalDensityRecord>> {
        let file = match File::open(&self.path) {
            Ok(f) => f,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e),
        };
        file.lock_shared()?;
        let found = Self::scan(&file, key);
        file.unlock()?;
        found
    }

    /// Appends unless an equal key landed in the meantime; returns the stored record.
    pub fn insert(&self, key: &CacheKey, rec: &LocalDensityRecord) -> io::Result<LocalDensityRecord> {
        let mut file = OpenOptions::new().read(true).append(true).create(true).open(&self.path)?;
        file.lock()?;
        let result = (|| {
            if let Some(existing) = Self::scan(&file, key)? {
                return Ok(existing);
            }
            let mut line = serde_json::to_string(&CacheLine::from_record(rec, key.seed))
                .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
            line.push('\n');
            // a single write keeps the line whole even if a reader ignores the lock
            file.write_all(line.as_bytes())?;
            file.flush()?;
            Ok(rec.clone())
        })();
        file.unlock()?;
        result
    }

    /// Cached record for `key`, computing and appending it on a miss.
    pub fn get_or_compute(
        &self,
        key: &CacheKey,
        compute: impl FnOnce() -> Result<LocalDensityRecord, RunError>,
    ) -> Result<(LocalDensityRecord, bool), RunError> {
        if let Some(rec) = self.lookup(key)? {
            log::debug!("cache hit for {} p={} {}", key.family, key.p, key.method.name());
            return Ok((rec, true));
        }
        let rec = compute()?;
        Ok((self.insert(key, &rec)?, false))
    }
}
