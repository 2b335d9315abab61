//! Prime sieving, von Mangoldt weights, and explicit prime sums.
//!
//! The sieve is a segmented Eratosthenes over a plain bitset. Segments are
//! cache-sized (2²² numbers by default), word-aligned, and marked in
//! parallel; every segment's content depends only on the base primes, so
//! the table is bit-identical for any worker count.
//!
//! Λ(m) is never stored: the von Mangoldt weight `log p` is recovered by
//! enumerating primes and their powers `p^k ≤ limit` in increasing order of
//! `p^k` (a merge of the prime stream with the short sorted list of proper
//! powers). All sums run in increasing `m` with compensated accumulation.

use crate::sum::CompensatedSum;
use rayon::prelude::*;
use std::io::{Read, Write};
use std::path::Path;
use thiserror::Error;

/// Default sieve segment, in numbers. 2²² numbers = 512 KiB of bits.
pub const DEFAULT_SEGMENT: u64 = 1 << 22;

const CACHE_MAGIC: &[u8; 6] = b"SNMPT\0";
const CACHE_VERSION: u16 = 1;
const LIMIT_CAP: u64 = 1 << 40;

#[derive(Debug, Error)]
pub enum ArithmeticError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("resource error: {0}")]
    Resource(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad table file: {0}")]
    Format(String),
}

/// Primality lookup over `[2, limit]`, bit `m` set iff `m` is prime.
#[derive(Debug, Clone)]
pub struct PrimeTable {
    limit: u64,
    bits: Vec<u64>,
}

/// One term of the von Mangoldt support: `value = prime^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimePower {
    pub value: u64,
    pub prime: u64,
    pub exponent: u32,
}

impl PrimePower {
    /// Λ(value) = log(prime).
    #[inline]
    pub fn lambda(&self) -> f64 {
        (self.prime as f64).ln()
    }
}

/// Sieve of Eratosthenes up to `limit` with the default segment size.
pub fn sieve(limit: u64) -> Result<PrimeTable, ArithmeticError> {
    sieve_with_segment(limit, DEFAULT_SEGMENT)
}

/// Sieve with an explicit segment size (rounded up to a multiple of 64).
pub fn sieve_with_segment(limit: u64, segment: u64) -> Result<PrimeTable, ArithmeticError> {
    if limit < 2 {
        return Err(ArithmeticError::Domain(format!(
            "sieve limit must be at least 2, got {limit}"
        )));
    }
    if limit > LIMIT_CAP {
        return Err(ArithmeticError::Precondition(format!(
            "sieve limit {limit} exceeds 2^40"
        )));
    }
    let segment_words = (segment.max(64).div_ceil(64)) as usize;
    let words = (limit / 64 + 1) as usize;
    let mut bits: Vec<u64> = Vec::new();
    bits.try_reserve_exact(words)
        .map_err(|e| ArithmeticError::Resource(format!("cannot allocate prime table: {e}")))?;
    bits.resize(words, 0u64);

    // Base primes up to √limit by a small plain sieve.
    let root = limit.isqrt();
    let base = small_sieve(root);

    bits.par_chunks_mut(segment_words)
        .enumerate()
        .for_each(|(chunk_idx, seg)| {
            let lo = chunk_idx as u64 * segment_words as u64 * 64;
            let hi = (lo + seg.len() as u64 * 64).min(limit + 1);
            for w in seg.iter_mut() {
                *w = !0u64;
            }
            for &p in &base {
                let mut m = (p * p).max(lo.div_ceil(p) * p);
                while m < hi {
                    seg[((m - lo) / 64) as usize] &= !(1u64 << (m % 64));
                    m += p;
                }
            }
        });

    // 0 and 1 are not prime; mask anything beyond the limit.
    bits[0] &= !0b11;
    let last_bit = (limit % 64) as u32;
    let len = bits.len();
    if last_bit < 63 {
        bits[len - 1] &= (1u64 << (last_bit + 1)) - 1;
    }
    Ok(PrimeTable { limit, bits })
}

fn small_sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut is_prime = vec![true; n + 1];
    is_prime[0] = false;
    if n >= 1 {
        is_prime[1] = false;
    }
    let mut p = 2usize;
    while p * p <= n {
        if is_prime[p] {
            let mut m = p * p;
            while m <= n {
                is_prime[m] = false;
                m += p;
            }
        }
        p += 1;
    }
    (2..=n).filter(|&m| is_prime[m]).map(|m| m as u64).collect()
}

impl PrimeTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    #[inline]
    pub fn is_prime(&self, m: u64) -> bool {
        m <= self.limit && (self.bits[(m / 64) as usize] >> (m % 64)) & 1 == 1
    }

    /// Number of primes up to the limit.
    pub fn count_primes(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Ascending iterator over primes.
    pub fn primes(&self) -> Primes<'_> {
        Primes {
            table: self,
            word_idx: 0,
            current: self.bits[0],
        }
    }

    /// Ascending, exhaustive, duplicate-free iterator over prime powers
    /// `p^k ≤ limit` (the support of the von Mangoldt function).
    pub fn prime_powers(&self) -> PrimePowers<'_> {
        let mut proper: Vec<PrimePower> = Vec::new();
        for p in self.primes() {
            match p.checked_mul(p) {
                Some(sq) if sq <= self.limit => {
                    let mut value = sq;
                    let mut exponent = 2u32;
                    loop {
                        proper.push(PrimePower {
                            value,
                            prime: p,
                            exponent,
                        });
                        match value.checked_mul(p) {
                            Some(next) if next <= self.limit => {
                                value = next;
                                exponent += 1;
                            }
                            _ => break,
                        }
                    }
                }
                _ => break,
            }
        }
        proper.sort_unstable_by_key(|pp| pp.value);
        let mut primes = self.primes();
        let next_prime = primes.next();
        let mut proper = proper.into_iter();
        let next_proper = proper.next();
        PrimePowers {
            primes,
            proper,
            next_prime,
            next_proper,
        }
    }

    /// Serialize as the binary cache format: 16-byte header (magic
    /// `SNMPT\0`, version u16, limit u64, little-endian) followed by the
    /// raw bits over `[2, limit]`, LSB-first within little-endian words.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<(), ArithmeticError> {
        out.write_all(CACHE_MAGIC)?;
        out.write_all(&CACHE_VERSION.to_le_bytes())?;
        out.write_all(&self.limit.to_le_bytes())?;
        let payload_bits = self.limit - 1; // m = 2..=limit
        let payload_words = payload_bits.div_ceil(64) as usize;
        let mut buf = Vec::with_capacity(payload_words * 8);
        for k in 0..payload_words {
            // payload bit j is internal bit j+2
            let lo = self.bits.get(k).copied().unwrap_or(0) >> 2;
            let hi = self.bits.get(k + 1).copied().unwrap_or(0) << 62;
            let mut w = lo | hi;
            if k == payload_words - 1 {
                let used = payload_bits - 64 * k as u64;
                if used < 64 {
                    w &= (1u64 << used) - 1;
                }
            }
            buf.extend_from_slice(&w.to_le_bytes());
        }
        out.write_all(&buf)?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<(), ArithmeticError> {
        let file = std::fs::File::create(path)?;
        self.write_to(std::io::BufWriter::new(file))
    }

    pub fn read_from<R: Read>(mut input: R) -> Result<Self, ArithmeticError> {
        let mut header = [0u8; 16];
        input.read_exact(&mut header)?;
        if &header[..6] != CACHE_MAGIC {
            return Err(ArithmeticError::Format("bad magic".into()));
        }
        let version = u16::from_le_bytes([header[6], header[7]]);
        if version != CACHE_VERSION {
            return Err(ArithmeticError::Format(format!(
                "unsupported version {version}"
            )));
        }
        let limit = u64::from_le_bytes(header[8..16].try_into().unwrap());
        if limit < 2 || limit > LIMIT_CAP {
            return Err(ArithmeticError::Format(format!("bad limit {limit}")));
        }
        let payload_bits = limit - 1;
        let payload_words = payload_bits.div_ceil(64) as usize;
        let mut raw = vec![0u8; payload_words * 8];
        input.read_exact(&mut raw)?;
        let payload: Vec<u64> = raw
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let words = (limit / 64 + 1) as usize;
        let mut bits = vec![0u64; words];
        for k in 0..words {
            let lo = payload.get(k.wrapping_sub(1)).copied().unwrap_or(0);
            let hi = payload.get(k).copied().unwrap_or(0);
            bits[k] = if k == 0 { hi << 2 } else { (hi << 2) | (lo >> 62) };
        }
        bits[0] &= !0b11;
        let last_bit = (limit % 64) as u32;
        if last_bit < 63 {
            bits[words - 1] &= (1u64 << (last_bit + 1)) - 1;
        }
        Ok(PrimeTable { limit, bits })
    }

    pub fn load(path: &Path) -> Result<Self, ArithmeticError> {
        let file = std::fs::File::open(path)?;
        Self::read_from(std::io::BufReader::new(file))
    }

    fn require_covers(&self, x: f64, what: &str) -> Result<(), ArithmeticError> {
        if !(x.is_finite()) {
            return Err(ArithmeticError::Domain(format!("{what}: x must be finite")));
        }
        if (self.limit as f64) < x {
            return Err(ArithmeticError::Precondition(format!(
                "{what}: table limit {} is below x = {x}",
                self.limit
            )));
        }
        Ok(())
    }
}

/// Ascending prime iterator over a [`PrimeTable`].
pub struct Primes<'a> {
    table: &'a PrimeTable,
    word_idx: usize,
    current: u64,
}

impl Iterator for Primes<'_> {
    type Item = u64;

    #[inline]
    fn next(&mut self) -> Option<u64> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros();
                self.current &= self.current - 1;
                return Some(self.word_idx as u64 * 64 + bit as u64);
            }
            self.word_idx += 1;
            if self.word_idx >= self.table.bits.len() {
                return None;
            }
            self.current = self.table.bits[self.word_idx];
        }
    }
}

/// Ascending merge of primes with proper prime powers.
pub struct PrimePowers<'a> {
    primes: Primes<'a>,
    proper: std::vec::IntoIter<PrimePower>,
    next_prime: Option<u64>,
    next_proper: Option<PrimePower>,
}

impl Iterator for PrimePowers<'_> {
    type Item = PrimePower;

    fn next(&mut self) -> Option<PrimePower> {
        let take_prime = match (self.next_prime, self.next_proper) {
            (Some(p), Some(q)) => p < q.value,
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (None, None) => return None,
        };
        if take_prime {
            let p = self.next_prime.take().unwrap();
            self.next_prime = self.primes.next();
            Some(PrimePower {
                value: p,
                prime: p,
                exponent: 1,
            })
        } else {
            let q = self.next_proper.take().unwrap();
            self.next_proper = self.proper.next();
            Some(q)
        }
    }
}

/// `M(x) = Σ_{m ≤ x} Λ(m)²`, summed over prime powers in increasing order.
pub fn big_m(x: f64, table: &PrimeTable) -> Result<f64, ArithmeticError> {
    if x < 2.0 {
        return Err(ArithmeticError::Domain(format!("M(x) needs x ≥ 2, got {x}")));
    }
    table.require_covers(x, "big_m")?;
    let mut acc = CompensatedSum::new();
    for pp in table.prime_powers() {
        if pp.value as f64 > x {
            break;
        }
        let l = pp.lambda();
        acc.add(l * l);
    }
    Ok(acc.value())
}

/// `N(x) = Σ_{p ≤ x} log² p`.
pub fn big_n(x: f64, table: &PrimeTable) -> Result<f64, ArithmeticError> {
    if x < 2.0 {
        return Err(ArithmeticError::Domain(format!("N(x) needs x ≥ 2, got {x}")));
    }
    table.require_covers(x, "big_n")?;
    let mut acc = CompensatedSum::new();
    for p in table.primes() {
        if p as f64 > x {
            break;
        }
        let l = (p as f64).ln();
        acc.add(l * l);
    }
    Ok(acc.value())
}

/// `P(y) = Σ_{p ≤ y} log² p / p`.
pub fn p_sum(y: f64, table: &PrimeTable) -> Result<f64, ArithmeticError> {
    if y < 2.0 {
        return Err(ArithmeticError::Domain(format!("P(y) needs y ≥ 2, got {y}")));
    }
    table.require_covers(y, "p_sum")?;
    let mut acc = CompensatedSum::new();
    for p in table.primes() {
        if p as f64 > y {
            break;
        }
        let l = (p as f64).ln();
        acc.add(l * l / p as f64);
    }
    Ok(acc.value())
}

/// Chebyshev `θ(x) = Σ_{p ≤ x} log p`; zero below 2.
pub fn chebyshev_theta(x: f64, table: &PrimeTable) -> Result<f64, ArithmeticError> {
    if x < 2.0 {
        return Ok(0.0);
    }
    table.require_covers(x, "chebyshev_theta")?;
    let mut acc = CompensatedSum::new();
    for p in table.primes() {
        if p as f64 > x {
            break;
        }
        acc.add((p as f64).ln());
    }
    Ok(acc.value())
}

/// `c₀ = N(600) − θ(600)·log 600 + 600`.
pub fn c0_constant(table: &PrimeTable) -> Result<f64, ArithmeticError> {
    table.require_covers(600.0, "c0_constant")?;
    Ok(big_n(600.0, table)? - chebyshev_theta(600.0, table)? * 600f64.ln() + 600.0)
}
