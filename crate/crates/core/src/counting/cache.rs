//! Persistent count cache.
//!
//! One record per line: `key<TAB>decimal-count`, with keys of the form
//! `v1:count:l:r:n[:variant]`. Writers merge with the current file and
//! atomically replace it; readers never observe a partial file.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::counting::RegionSpec;
use crate::error::{Error, Result};

pub const CACHE_FILE: &str = "counts.tsv";

#[derive(Debug, Clone)]
pub struct CountCache {
    path: PathBuf,
}

impl CountCache {
    pub fn open(dir: impl AsRef<Path>) -> Result<Self> {
        fs::create_dir_all(dir.as_ref())?;
        Ok(Self {
            path: dir.as_ref().join(CACHE_FILE),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn key(region: &RegionSpec, variant: Option<&str>) -> String {
        let base = format!("v1:count:{}:{}:{}", region.ell, region.r, region.n);
        match variant {
            Some(v) => format!("{base}:{v}"),
            None => base,
        }
    }

    pub fn load(&self) -> Result<BTreeMap<String, u128>> {
        let text = match fs::read_to_string(&self.path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(BTreeMap::new()),
            Err(e) => return Err(e.into()),
        };
        let mut map = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('\t')
                .ok_or_else(|| Error::domain(format!("cache line {} has no tab", lineno + 1)))?;
            let value: u128 = value
                .trim()
                .parse()
                .map_err(|_| Error::domain(format!("cache line {} has a bad count", lineno + 1)))?;
            map.insert(key.to_string(), value);
        }
        Ok(map)
    }

    pub fn get(&self, key: &str) -> Result<Option<u128>> {
        Ok(self.load()?.get(key).copied())
    }

    pub fn put(&self, key: &str, value: u128) -> Result<()> {
        if key.contains('\t') || key.contains('\n') {
            return Err(Error::domain("cache keys may not contain tabs or newlines"));
        }
        let mut map = self.load()?;
        map.insert(key.to_string(), value);
        let dir = self.path.parent().unwrap_or(Path::new("."));
        let tmp = dir.join(format!(".{}.{}.tmp", CACHE_FILE, std::process::id()));
        {
            let mut f = fs::File::create(&tmp)?;
            for (k, v) in &map {
                writeln!(f, "{k}\t{v}")?;
            }
            f.sync_all()?;
        }
        fs::rename(&tmp, &self.path)?;
        Ok(())
    }

    pub fn get_or_compute(
        &self,
        key: &str,
        compute: impl FnOnce() -> Result<u128>,
    ) -> Result<u128> {
        if let Some(v) = self.get(key)? {
            return Ok(v);
        }
        let v = compute()?;
        self.put(key, v)?;
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_format() {
        let dir = tempfile::tempdir().unwrap();
        let cache = CountCache::open(dir.path()).unwrap();
        let region = RegionSpec::new(2, 2, 4).unwrap();
        let key = CountCache::key(&region, None);
        assert_eq!(key, "v1:count:2:2:4");
        assert_eq!(cache.get(&key).unwrap(), None);
        cache.put(&key, 8).unwrap();
        cache
            .put(&CountCache::key(&region, Some("cap=2")), 3)
            .unwrap();
        assert_eq!(cache.get(&key).unwrap(), Some(8));
        let text = fs::read_to_string(cache.path()).unwrap();
        assert_eq!(text, "v1:count:2:2:4\t8\nv1:count:2:2:4:cap=2\t3\n");
    }

    #[test]
    fn rejects_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let cache = CountCache::open(dir.path()).unwrap();
        fs::write(cache.path(), "no-tab-here\n").unwrap();
        assert!(cache.load().is_err());
    }
}
