//! On-disk cache of expensive intermediates, keyed by the full parameter
//! tuple. Writes go to a temporary file that is then renamed into place.

use serde::de::DeserializeOwned;
use serde::Serialize;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const ENV_VAR: &str = "WASEP_CACHE_DIR";

#[derive(Clone, Debug)]
pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    /// `--cache-dir` wins over the environment; neither means no caching.
    pub fn new(flag: Option<PathBuf>) -> Self {
        let dir = flag.or_else(|| std::env::var_os(ENV_VAR).filter(|v| !v.is_empty()).map(PathBuf::from));
        Self { dir }
    }

    #[cfg(test)]
    pub fn disabled() -> Self {
        Self { dir: None }
    }

    fn path(&self, kind: &str, key: &str) -> Option<PathBuf> {
        let safe: String = key.chars().map(|c| if c.is_ascii_alphanumeric() || "-_.=".contains(c) { c } else { '_' }).collect();
        self.dir.as_ref().map(|d| d.join(kind).join(format!("{safe}.json")))
    }

    /// Unreadable or stale entries count as misses.
    pub fn load<T: DeserializeOwned>(&self, kind: &str, key: &str) -> Option<T> {
        let p = self.path(kind, key)?;
        let text = fs::read_to_string(p).ok()?;
        serde_json::from_str(&text).ok()
    }

    pub fn store<T: Serialize>(&self, kind: &str, key: &str, value: &T) -> std::io::Result<()> {
        let Some(p) = self.path(kind, key) else {
            return Ok(());
        };
        let dir = p.parent().expect("cache path has a parent");
        fs::create_dir_all(dir)?;
        write_atomic(dir, &p, &serde_json::to_vec(value).expect("cache entries serialize"))
    }

    /// Cached value, or compute and store it.
    pub fn get_or<T, E, F>(&self, kind: &str, key: &str, compute: F) -> Result<T, E>
    where
        T: Serialize + DeserializeOwned,
        F: FnOnce() -> Result<T, E>,
    {
        if let Some(v) = self.load(kind, key) {
            return Ok(v);
        }
        let v = compute()?;
        // a failed write only costs a recomputation next time
        let _ = self.store(kind, key, &v);
        Ok(v)
    }
}

fn write_atomic(dir: &Path, target: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = dir.join(format!(".{}.{}.tmp", std::process::id(), unique()));
    let mut f = fs::File::create(&tmp)?;
    f.write_all(bytes)?;
    f.sync_all()?;
    drop(f);
    fs::rename(&tmp, target).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })
}

fn unique() -> u64 {
    use std::sync::atomic::{AtomicU64, Ordering};
    static N: AtomicU64 = AtomicU64::new(0);
    N.fetch_add(1, Ordering::Relaxed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_miss() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache::new(Some(dir.path().to_path_buf()));
        assert_eq!(c.load::<Vec<u32>>("k", "a b"), None);
        c.store("k", "a b", &vec![1u32, 2]).unwrap();
        assert_eq!(c.load::<Vec<u32>>("k", "a b"), Some(vec![1, 2]));
        let calls = std::cell::Cell::new(0);
        let v: Result<u32, ()> = c.get_or("k", "x", || {
            calls.set(calls.get() + 1);
            Ok(7)
        });
        assert_eq!(v, Ok(7));
        let v: Result<u32, ()> = c.get_or("k", "x", || unreachable!());
        assert_eq!(v, Ok(7));
        assert_eq!(calls.get(), 1);
        // no temporaries left behind
        let leftovers = fs::read_dir(dir.path().join("k")).unwrap().filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().ends_with(".tmp")).count();
        assert_eq!(leftovers, 0);
    }

    #[test]
    fn disabled_cache_never_stores() {
        let c = Cache::disabled();
        c.store("k", "a", &1u8).unwrap();
        assert_eq!(c.load::<u8>("k", "a"), None);
    }
}
