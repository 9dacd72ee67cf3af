//! Persistent a_p table for the CM L-series.
//!
//! The on-disk format is plain text, one line per prime, "p<TAB>a_p<LF>",
//! with primes strictly ascending and no header.  Round-trips are
//! bit-exact: load followed by save reproduces the file byte for byte.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("io error on a_p cache: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed a_p cache line {line}: {content:?}")]
    Malformed { line: usize, content: String },
    #[error("a_p cache line {line}: prime {p} out of order or duplicated")]
    OutOfOrder { line: usize, p: u64 },
    #[error("a_p cache line {line}: {p} is not prime")]
    NotPrime { line: usize, p: u64 },
    #[error("a_p cache line {line}: |a_p| = {ap} violates the Hasse bound for p = {p}")]
    HasseBound { line: usize, p: u64, ap: i64 },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ApCache {
    entries: BTreeMap<u64, i64>,
}

impl ApCache {
    pub fn new() -> ApCache {
        ApCache::default()
    }

    pub fn get(&self, p: u64) -> Option<i64> {
        self.entries.get(&p).copied()
    }

    pub fn insert(&mut self, p: u64, ap: i64) {
        self.entries.insert(p, ap);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, i64)> + '_ {
        self.entries.iter().map(|(&p, &a)| (p, a))
    }

    pub fn load(path: &Path) -> Result<ApCache, CacheError> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<ApCache, CacheError> {
        let mut entries = BTreeMap::new();
        let mut last: Option<u64> = None;
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let malformed = || CacheError::Malformed {
                line: lineno,
                content: line.to_string(),
            };
            let (ps, aps) = line.split_once('\t').ok_or_else(malformed)?;
            let p: u64 = ps.parse().map_err(|_| malformed())?;
            let ap: i64 = aps.parse().map_err(|_| malformed())?;
            if last.is_some_and(|q| p <= q) {
                return Err(CacheError::OutOfOrder { line: lineno, p });
            }
            if !crate::arith::is_prime(p) {
                return Err(CacheError::NotPrime { line: lineno, p });
            }
            // Hasse: a_p^2 <= 4p (equality impossible for p != 7 here, but
            // the bound is what the format guarantees).
            if (ap as i128) * (ap as i128) > 4 * p as i128 {
                return Err(CacheError::HasseBound {
                    line: lineno,
                    p,
                    ap,
                });
            }
            last = Some(p);
            entries.insert(p, ap);
        }
        Ok(ApCache { entries })
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for (&p, &ap) in &self.entries {
            out.push_str(&format!("{p}\t{ap}\n"));
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<(), CacheError> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.serialize().as_bytes())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_is_bit_exact() {
        let text = "2\t1\n3\t0\n11\t4\n13\t0\n";
        let cache = ApCache::parse(text).unwrap();
        assert_eq!(cache.serialize(), text);
        assert_eq!(cache.get(11), Some(4));
        assert_eq!(cache.get(5), None);
    }

    #[test]
    fn file_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ap.tsv");
        let mut cache = ApCache::new();
        cache.insert(2, 1);
        cache.insert(23, 8);
        cache.save(&path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(bytes, b"2\t1\n23\t8\n");
        assert_eq!(ApCache::load(&path).unwrap(), cache);
    }

    #[test]
    fn malformed_lines_carry_line_numbers() {
        let err = ApCache::parse("2\t1\n3 0\n").unwrap_err();
        assert!(matches!(err, CacheError::Malformed { line: 2, .. }));

        let err = ApCache::parse("3\t0\n2\t1\n").unwrap_err();
        assert!(matches!(err, CacheError::OutOfOrder { line: 2, p: 2 }));

        let err = ApCache::parse("4\t1\n").unwrap_err();
        assert!(matches!(err, CacheError::NotPrime { line: 1, p: 4 }));

        let err = ApCache::parse("11\t9\n").unwrap_err();
        assert!(matches!(err, CacheError::HasseBound { line: 1, .. }));
    }
}
