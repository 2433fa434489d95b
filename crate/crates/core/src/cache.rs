//! On-disk prime tables, `primes-Y.bin`.
//!
//! Layout (little endian): `"GPRM"`, `u32` version, `u64` Y, then one
//! 16-byte record `(i32 re, i32 im, u64 norm)` per primary prime, ascending
//! by `(norm, re, im)`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::sieve::{GPrime, PrimeTable};
use crate::zint::GInt;

pub const MAGIC: [u8; 4] = *b"GPRM";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 16;
pub const RECORD_LEN: usize = 16;

/// Environment variable overriding the cache directory.
pub const CACHE_ENV: &str = "GAUSSDENSITY_CACHE";
pub const DEFAULT_DIR: &str = ".gaussdensity-cache";

/// `--cache` if given, then `$GAUSSDENSITY_CACHE`, then [`DEFAULT_DIR`].
pub fn resolve_dir(flag: Option<&Path>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    match std::env::var_os(CACHE_ENV) {
        Some(v) if !v.is_empty() => PathBuf::from(v),
        _ => PathBuf::from(DEFAULT_DIR),
    }
}

pub fn cache_path(dir: &Path, y: u64) -> PathBuf {
    dir.join(format!("primes-{y}.bin"))
}

pub fn encode(table: &PrimeTable) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + RECORD_LEN * table.len());
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&table.y.to_le_bytes());
    for p in &table.primes {
        out.extend_from_slice(&(p.value.re as i32).to_le_bytes());
        out.extend_from_slice(&(p.value.im as i32).to_le_bytes());
        out.extend_from_slice(&p.norm.to_le_bytes());
    }
    out
}

/// Parses and validates a cache image. `expect_y` rejects a file built for
/// a different bound.
pub fn decode(bytes: &[u8], expect_y: Option<u64>, path: &Path) -> Result<PrimeTable> {
    let bad = |reason: String| Error::CacheFormat {
        path: path.to_path_buf(),
        reason,
    };
    if bytes.len() < HEADER_LEN {
        return Err(bad(format!("{} bytes is shorter than the header", bytes.len())));
    }
    if bytes[..4] != MAGIC {
        return Err(bad(format!("magic {:?} is not GPRM", &bytes[..4])));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes"));
    if version != VERSION {
        return Err(bad(format!("version {version}, expected {VERSION}")));
    }
    let y = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes"));
    if let Some(want) = expect_y {
        if y != want {
            return Err(bad(format!("built for Y = {y}, expected {want}")));
        }
    }
    let body = &bytes[HEADER_LEN..];
    if !body.len().is_multiple_of(RECORD_LEN) {
        return Err(bad(format!("body of {} bytes is not whole records", body.len())));
    }
    let mut primes = Vec::with_capacity(body.len() / RECORD_LEN);
    let mut prev: Option<(u64, i64, i64)> = None;
    for rec in body.chunks_exact(RECORD_LEN) {
        let re = i32::from_le_bytes(rec[0..4].try_into().expect("4 bytes")) as i64;
        let im = i32::from_le_bytes(rec[4..8].try_into().expect("4 bytes")) as i64;
        let norm = u64::from_le_bytes(rec[8..16].try_into().expect("8 bytes"));
        let z = GInt::new(re, im);
        if z.norm() != norm || norm > y || !z.is_primary() {
            return Err(bad(format!("record ({re}, {im}, {norm}) is inconsistent")));
        }
        let key = z.sort_key();
        if prev.is_some_and(|p| p >= key) {
            return Err(bad(format!("record ({re}, {im}, {norm}) is out of order")));
        }
        prev = Some(key);
        primes.push(GPrime::new(z));
    }
    Ok(PrimeTable { y, primes })
}

/// Writes through a temporary file so a crash never leaves a torn cache.
pub fn write_table(path: &Path, table: &PrimeTable) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("bin.tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&encode(table))?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_table(path: &Path, expect_y: Option<u64>) -> Result<PrimeTable> {
    decode(&fs::read(path)?, expect_y, path)
}

#[derive(Clone, Debug, PartialEq)]
pub enum CacheStatus {
    /// A valid file was already present and left untouched.
    Reused,
    /// No file existed.
    Written,
    /// An invalid file was replaced.
    Regenerated { reason: String },
}

/// Loads `primes-Y.bin` from `dir`, sieving and writing it when absent or
/// invalid.
pub fn ensure(dir: &Path, y: u64) -> Result<(PrimeTable, CacheStatus)> {
    let path = cache_path(dir, y);
    let status = match read_table(&path, Some(y)) {
        Ok(t) => return Ok((t, CacheStatus::Reused)),
        Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::NotFound => CacheStatus::Written,
        Err(e @ Error::CacheFormat { .. }) => CacheStatus::Regenerated { reason: e.to_string() },
        Err(e) => return Err(e),
    };
    let table = PrimeTable::new(y);
    write_table(&path, &table)?;
    Ok((table, status))
}
