//! Ordered prime table backed by a segmented sieve of Eratosthenes.
//!
//! The table only ever grows. Growth estimates an upper bound for the
//! n-th prime, sieves the not-yet-covered range in fixed-size segments and
//! doubles the limit if the estimate fell short.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Default cap on the sieve limit (2^40).
pub const DEFAULT_SIEVE_CAP: u64 = 1 << 40;

const SEGMENT_LEN: u64 = 1 << 18;
const CACHE_MAGIC: &[u8; 5] = b"PRIM1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    values: Vec<u64>,
    sieve_limit: u64,
    cap: u64,
}

impl Default for PrimeTable {
    fn default() -> Self {
        Self::new()
    }
}

impl PrimeTable {
    pub fn new() -> Self {
        Self::with_cap(DEFAULT_SIEVE_CAP)
    }

    pub fn with_cap(cap: u64) -> Self {
        PrimeTable {
            values: Vec::new(),
            sieve_limit: 1,
            cap,
        }
    }

    /// Table holding at least the first `m` primes.
    pub fn with_count(m: usize) -> Result<Self> {
        let mut table = Self::new();
        table.ensure_count(m)?;
        Ok(table)
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest integer covered by the sieve so far.
    pub fn sieve_limit(&self) -> u64 {
        self.sieve_limit
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    /// Grows the table until it holds at least `m` primes. Existing entries
    /// never change, and a call with `m <= len()` is a no-op.
    pub fn ensure_count(&mut self, m: usize) -> Result<()> {
        if m == 0 {
            return Err(Error::InvalidArgument("prime count must be at least 1".into()));
        }
        if self.values.len() >= m {
            return Ok(());
        }
        let mut limit = nth_prime_upper_bound(m as u64).max(self.sieve_limit + 1);
        loop {
            if limit > self.cap {
                return Err(Error::ResourceExhausted {
                    requested: limit,
                    cap: self.cap,
                });
            }
            self.extend_to(limit);
            if self.values.len() >= m {
                return Ok(());
            }
            limit = limit.saturating_mul(2);
        }
    }

    /// Square roots of the first `m` primes, growing the table as needed.
    pub fn slice_roots(&mut self, m: usize) -> Result<Vec<f64>> {
        self.ensure_count(m)?;
        Ok(self.values[..m].iter().map(|&p| (p as f64).sqrt()).collect())
    }

    fn extend_to(&mut self, limit: u64) {
        if limit <= self.sieve_limit {
            return;
        }
        let base = simple_sieve(isqrt(limit));
        let mut lo = self.sieve_limit + 1;
        let mut segment = vec![true; SEGMENT_LEN as usize];
        while lo <= limit {
            let hi = (lo + SEGMENT_LEN - 1).min(limit);
            let len = (hi - lo + 1) as usize;
            segment[..len].fill(true);
            for &p in &base {
                if p * p > hi {
                    break;
                }
                let first = (p * p).max(lo.div_ceil(p) * p);
                let mut j = first;
                while j <= hi {
                    segment[(j - lo) as usize] = false;
                    j += p;
                }
            }
            for (offset, &is_prime) in segment[..len].iter().enumerate() {
                let n = lo + offset as u64;
                if is_prime && n >= 2 {
                    self.values.push(n);
                }
            }
            lo = hi + 1;
        }
        self.sieve_limit = limit;
    }

    /// Writes the binary cache: `PRIM1`, u64 LE count, then u64 LE primes.
    pub fn save<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut buf = Vec::with_capacity(13 + 8 * self.values.len());
        buf.extend_from_slice(CACHE_MAGIC);
        buf.extend_from_slice(&(self.values.len() as u64).to_le_bytes());
        for p in &self.values {
            buf.extend_from_slice(&p.to_le_bytes());
        }
        let mut file = fs::File::create(path)?;
        file.write_all(&buf)?;
        Ok(())
    }

    /// Reads a cache written by [`PrimeTable::save`]. The content is validated
    /// against the table invariants, so a truncated or foreign file is an error.
    pub fn load<P: AsRef<Path>>(path: P) -> Result<Self> {
        let mut bytes = Vec::new();
        fs::File::open(path)?.read_to_end(&mut bytes)?;
        Self::from_cache_bytes(&bytes)
    }

    pub fn from_cache_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 13 || &bytes[..5] != CACHE_MAGIC {
            return Err(Error::MalformedCache("missing PRIM1 header".into()));
        }
        let count = u64::from_le_bytes(bytes[5..13].try_into().unwrap()) as usize;
        let body = &bytes[13..];
        if body.len() != count.saturating_mul(8) {
            return Err(Error::MalformedCache(format!(
                "count {count} does not match payload of {} bytes",
                body.len()
            )));
        }
        let values: Vec<u64> = body
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        if values.is_empty() {
            return Ok(Self::new());
        }
        // Structural checks only; a full re-sieve would defeat the cache.
        if values[0] != 2 || values.windows(2).any(|w| w[0] >= w[1] || w[1] % 2 == 0) {
            return Err(Error::MalformedCache(
                "payload is not an ascending prime sequence".into(),
            ));
        }
        let last = *values.last().unwrap();
        if (values.len() as u64) < prime_count_lower_bound(last) {
            return Err(Error::MalformedCache("payload has gaps".into()));
        }
        Ok(PrimeTable {
            values,
            sieve_limit: last,
            cap: DEFAULT_SIEVE_CAP,
        })
    }
}

/// Rosser-type upper bound `n (ln n + ln ln n)` for n ≥ 6; 15 below that.
pub fn nth_prime_upper_bound(n: u64) -> u64 {
    if n < 6 {
        return 15;
    }
    let nf = n as f64;
    (nf * (nf.ln() + nf.ln().ln())).ceil() as u64
}

/// pi(x) >= x / ln x for x >= 17.
fn prime_count_lower_bound(x: u64) -> u64 {
    if x < 17 {
        return 1;
    }
    let xf = x as f64;
    (xf / xf.ln()).floor() as u64
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn simple_sieve(limit: u64) -> Vec<u64> {
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
    for i in 2..=limit {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= limit {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}
