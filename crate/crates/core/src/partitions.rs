//! Colored partition counts, exact and mod `ell`, and the generating
//! functions `f_{r,ell,delta}` built from them.
//!
//! Two independent routes produce the same numbers:
//!
//! * the exact divisor-sum recursion
//!   `p_r(n) = (r/n) sum_{j<n} p_r(j) sigma(n-j)` over big integers, and
//! * series inversion of the `r`-th Euler-product power over `F_ell`,
//!   which is division-free and therefore safe at indices divisible by `ell`.
//!
//! The mod tables are the workhorse; the exact recursion is kept as the
//! oracle the tables are checked against.

use crate::arith::{kronecker, sigma_sieve, PrimeField};
use crate::error::{Error, Result};
use crate::etaforms::{eta_pow, euler_product};
use crate::qseries::{Q24Series, SeriesMeta};
use num_bigint::BigUint;
use num_traits::Zero;
use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TableValues {
    Exact(Vec<BigUint>),
    Mod(Vec<u64>),
}

/// Values `p_r(0..=n_max)`, either exact or reduced mod a prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionTable {
    pub r: u64,
    /// `None` for exact big-integer tables.
    pub ell: Option<u64>,
    values: TableValues,
}

impl PartitionTable {
    pub fn n_max(&self) -> u64 {
        match &self.values {
            TableValues::Exact(v) => v.len() as u64 - 1,
            TableValues::Mod(v) => v.len() as u64 - 1,
        }
    }

    /// `p_r(n) mod ell` for a mod table; panics when out of range or when
    /// called on an exact table (reduce it first).
    #[inline]
    pub fn value_mod(&self, n: u64) -> u64 {
        match &self.values {
            TableValues::Mod(v) => v[n as usize],
            TableValues::Exact(_) => panic!("value_mod on an exact table; use reduced()"),
        }
    }

    pub fn exact(&self, n: u64) -> Option<&BigUint> {
        match &self.values {
            TableValues::Exact(v) => v.get(n as usize),
            TableValues::Mod(_) => None,
        }
    }

    /// Reduce an exact table mod `ell`.
    pub fn reduced(&self, ell: u64) -> Result<PartitionTable> {
        let TableValues::Exact(v) = &self.values else {
            return Err(Error::InvalidArgument("table is already reduced".into()));
        };
        PrimeField::new(ell)?;
        let values = v.iter().map(|x| (x % ell).try_into().unwrap()).collect();
        Ok(PartitionTable {
            r: self.r,
            ell: Some(ell),
            values: TableValues::Mod(values),
        })
    }

    pub fn values_mod(&self) -> Option<&[u64]> {
        match &self.values {
            TableValues::Mod(v) => Some(v),
            TableValues::Exact(_) => None,
        }
    }
}

/// Exact `p_r(n)` for `0 <= n <= n_max` via the divisor-sum recursion.
/// The division by `n` is exact at every step; a failed division would mean
/// a broken sigma table and panics.
pub fn pr_exact(r: u64, n_max: u64) -> Result<PartitionTable> {
    if r < 1 {
        return Err(Error::InvalidArgument("color count r must be >= 1".into()));
    }
    let mut values = Vec::with_capacity(n_max as usize + 1);
    values.push(BigUint::from(1u32));
    if n_max >= 1 {
        let sigma = sigma_sieve(n_max)?;
        for n in 1..=n_max {
            let mut acc = BigUint::zero();
            for j in 0..n {
                acc += &values[j as usize] * sigma.get(n - j);
            }
            let num = acc * r;
            assert!(
                (&num % n).is_zero(),
                "sigma recursion divided inexactly at n={n}"
            );
            values.push(num / n);
        }
    }
    Ok(PartitionTable {
        r,
        ell: None,
        values: TableValues::Exact(values),
    })
}

/// `p_r(n) mod ell` for `0 <= n <= n_max` by inverting the `r`-th power of
/// the Euler product over `F_ell`.
pub fn pr_mod(r: u64, ell: u64, n_max: u64) -> Result<PartitionTable> {
    if r < 1 {
        return Err(Error::InvalidArgument("color count r must be >= 1".into()));
    }
    let n = n_max as i64;
    let series = euler_product(ell, n)?.pow(r, n)?.inv(n)?;
    debug_assert_eq!(series.start(), 0);
    let values = (0..=n).map(|i| series.coeff(i).unwrap()).collect();
    Ok(PartitionTable {
        r,
        ell: Some(ell),
        values: TableValues::Mod(values),
    })
}

/// Read-mostly cache of mod tables, keyed by `(r, ell)`. Tables only ever
/// grow; concurrent readers share `Arc`s.
#[derive(Default)]
pub struct TableCache {
    inner: RwLock<HashMap<(u64, u64), Arc<PartitionTable>>>,
}

impl TableCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Seed the cache with an externally loaded mod table. Keeps whichever
    /// of the existing and new table is longer.
    pub fn insert(&self, table: PartitionTable) {
        let Some(ell) = table.ell else { return };
        let key = (table.r, ell);
        let mut map = self.inner.write().unwrap();
        match map.get(&key) {
            Some(old) if old.n_max() >= table.n_max() => {}
            _ => {
                map.insert(key, Arc::new(table));
            }
        }
    }

    /// A table for `(r, ell)` covering at least `0..=n_max`.
    pub fn get_mod(&self, r: u64, ell: u64, n_max: u64) -> Result<Arc<PartitionTable>> {
        {
            let map = self.inner.read().unwrap();
            if let Some(t) = map.get(&(r, ell)) {
                if t.n_max() >= n_max {
                    return Ok(Arc::clone(t));
                }
            }
        }
        // grow geometrically so repeated small extensions stay cheap
        let target = {
            let map = self.inner.read().unwrap();
            let old = map.get(&(r, ell)).map(|t| t.n_max()).unwrap_or(0);
            n_max.max(2 * old).max(1024)
        };
        let fresh = Arc::new(pr_mod(r, ell, target)?);
        let mut map = self.inner.write().unwrap();
        let entry = map.entry((r, ell)).or_insert_with(|| Arc::clone(&fresh));
        if entry.n_max() < fresh.n_max() {
            *entry = Arc::clone(&fresh);
        }
        Ok(Arc::clone(entry))
    }
}

/// One generating function `f_{r,ell,delta}` with its bookkeeping metadata.
#[derive(Debug, Clone)]
pub struct GenFunc {
    pub r: u64,
    pub ell: u64,
    pub delta: i8,
    pub series: Q24Series,
    pub meta: SeriesMeta,
}

fn check_coprime(r: u64, ell: u64) -> Result<()> {
    if r % ell == 0 {
        return Err(Error::ExcludedCase(format!("ell = {ell} divides r = {r}")));
    }
    Ok(())
}

/// Smallest `N >= lo` with `N = class (mod 24)`.
fn first_in_class(lo: i64, class: i64) -> i64 {
    let c = class.rem_euclid(24);
    let rem = lo.rem_euclid(24);
    lo + (c - rem).rem_euclid(24)
}

/// Assemble `f_{r,ell,delta}` directly from a partition table, without a
/// shared cache. See [`build_f_cached`].
pub fn build_f(r: u64, ell: u64, delta: i8, trunc: i64) -> Result<GenFunc> {
    build_f_cached(&TableCache::new(), r, ell, delta, trunc)
}

/// Assemble `f_{r,ell,delta}` from the shared table cache.
///
/// * `delta = 0`: coefficient at `N` is `p_r((ell N + r)/24)`, supported on
///   `N = -r ell (mod 24)`;
/// * `delta = -1, +1`: coefficient at `N` is `p_r((N + r)/24)` restricted to
///   `(-rN | ell) = delta`, supported on `N = -r (mod 24)`.
pub fn build_f_cached(
    cache: &TableCache,
    r: u64,
    ell: u64,
    delta: i8,
    trunc: i64,
) -> Result<GenFunc> {
    check_coprime(r, ell)?;
    PrimeField::new(ell)?;
    let ri = r as i64;
    let elli = ell as i64;
    let (class, n_of, weight2): (i64, Box<dyn Fn(i64) -> i64>, i64) = match delta {
        0 => (
            -ri * elli,
            Box::new(move |n: i64| elli * n + ri),
            (r as i64) * (elli * elli - elli - 1),
        ),
        -1 | 1 => (
            -ri,
            Box::new(move |n: i64| n + ri),
            (r as i64) * elli * (elli * elli - elli - 1),
        ),
        _ => {
            return Err(Error::InvalidArgument(format!(
                "delta must be one of 0, -1, +1 (got {delta})"
            )))
        }
    };
    // N = -r is below every index with a nonnegative partition argument
    let lo = -ri - 24;
    let start = first_in_class(lo, class);
    if trunc < start {
        return Err(Error::InsufficientPrecision {
            needed: start,
            have: trunc,
        });
    }
    let needed_n = {
        let hi = n_of(trunc);
        if hi < 0 {
            0
        } else {
            (hi / 24 + 1) as u64
        }
    };
    let table = cache.get_mod(r, ell, needed_n)?;
    let mut coeffs = vec![0u64; (trunc - start + 1) as usize];
    let mut n = start;
    while n <= trunc {
        let num = n_of(n);
        if num >= 0 && num % 24 == 0 {
            let arg = (num / 24) as u64;
            let include = match delta {
                0 => true,
                d => kronecker(-ri * n, elli) == d as i32,
            };
            if include {
                coeffs[(n - start) as usize] = table.value_mod(arg);
            }
        }
        n += 24;
    }
    let series = Q24Series::new(ell, start, coeffs)?;
    let eta_exp = if delta == 0 { -ri * elli } else { -ri };
    Ok(GenFunc {
        r,
        ell,
        delta,
        series,
        meta: SeriesMeta::new(weight2, eta_exp, 1),
    })
}

/// `f_{r,ell,0}` by the independent modular route: apply `U_ell` to
/// `Delta^{r(ell^2-1)/24} = eta^{r(ell^2-1)}` and divide by `eta^{r ell}`.
/// This must agree coefficientwise with [`build_f`] at `delta = 0`.
pub fn build_f0_via_lemma(r: u64, ell: u64, trunc: i64) -> Result<Q24Series> {
    check_coprime(r, ell)?;
    let ri = r as i64;
    let elli = ell as i64;
    let exp = ri * (elli * elli - 1);
    // after U_ell we multiply by eta^{-r ell} (start -r ell), so the U_ell
    // output must reach trunc + r ell, and the eta power ell times that
    let u_trunc = trunc + ri * elli;
    let big = eta_pow(exp, ell, elli * u_trunc)?;
    let contracted = big.u_op(ell);
    let inv_part = eta_pow(-ri * elli, ell, trunc + 1)?;
    let out = contracted.mul(&inv_part)?;
    if out.trunc() < trunc {
        return Err(Error::InsufficientPrecision {
            needed: trunc,
            have: out.trunc(),
        });
    }
    Ok(out.truncated(trunc))
}

/// First grid index where `V_ell f_0 + f_{-1} + f_{+1}` differs from
/// `eta^{-r}`, if any, checking through `trunc`.
pub fn decomposition_mismatch(r: u64, ell: u64, trunc: i64) -> Result<Option<i64>> {
    decomposition_mismatch_cached(&TableCache::new(), r, ell, trunc)
}

/// [`decomposition_mismatch`] against a shared table cache.
pub fn decomposition_mismatch_cached(
    cache: &TableCache,
    r: u64,
    ell: u64,
    trunc: i64,
) -> Result<Option<i64>> {
    let f0 = build_f_cached(cache, r, ell, 0, trunc / ell as i64 + 1)?;
    let fm = build_f_cached(cache, r, ell, -1, trunc)?;
    let fp = build_f_cached(cache, r, ell, 1, trunc)?;
    let lhs = f0.series.v_op(ell).add(&fm.series)?.add(&fp.series)?;
    let rhs = eta_pow(-(r as i64), ell, trunc)?;
    let lo = lhs.start().min(rhs.start());
    lhs.first_mismatch(&rhs, lo, trunc)
}

// --- disk cache ---------------------------------------------------------

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x1000_0000_01b3;

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = FNV_OFFSET;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// Cache file name for a table: `pr_r<r>_ell<ell>.txt`, with `ell = 0`
/// marking exact tables.
pub fn table_file_name(r: u64, ell: Option<u64>) -> String {
    format!("pr_r{}_ell{}.txt", r, ell.unwrap_or(0))
}

pub fn table_path(dir: &Path, r: u64, ell: Option<u64>) -> PathBuf {
    dir.join(table_file_name(r, ell))
}

/// Serialize a table: a `PRTABLE 1` header, one value per line, and a
/// trailing checksum line over everything before it.
pub fn write_table(path: &Path, table: &PartitionTable) -> Result<()> {
    let mut body = String::new();
    body.push_str(&format!(
        "PRTABLE 1 r={} ell={} nmax={}\n",
        table.r,
        table.ell.unwrap_or(0),
        table.n_max()
    ));
    match &table.values {
        TableValues::Mod(v) => {
            for x in v {
                body.push_str(&x.to_string());
                body.push('\n');
            }
        }
        TableValues::Exact(v) => {
            for x in v {
                body.push_str(&x.to_string());
                body.push('\n');
            }
        }
    }
    let checksum = fnv1a(body.as_bytes());
    let mut file = std::fs::File::create(path)?;
    file.write_all(body.as_bytes())?;
    writeln!(file, "CHECKSUM {checksum:016x}")?;
    Ok(())
}

/// Parse and checksum-verify a table file.
pub fn read_table(path: &Path) -> Result<PartitionTable> {
    let file = std::fs::File::open(path)?;
    let reader = BufReader::new(file);
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::CacheCorrupt("empty file".into()))??;
    let mut body = header.clone();
    body.push('\n');
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 5 || fields[0] != "PRTABLE" || fields[1] != "1" {
        return Err(Error::CacheCorrupt(format!("bad header: {header}")));
    }
    let parse_kv = |s: &str, key: &str| -> Result<u64> {
        s.strip_prefix(&format!("{key}="))
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::CacheCorrupt(format!("bad field {s}")))
    };
    let r = parse_kv(fields[2], "r")?;
    let ell = parse_kv(fields[3], "ell")?;
    let n_max = parse_kv(fields[4], "nmax")?;
    let mut raw: Vec<String> = Vec::with_capacity(n_max as usize + 1);
    let mut checksum_line: Option<String> = None;
    for line in lines {
        let line = line?;
        if let Some(rest) = line.strip_prefix("CHECKSUM ") {
            checksum_line = Some(rest.to_string());
            break;
        }
        body.push_str(&line);
        body.push('\n');
        raw.push(line);
    }
    let Some(recorded) = checksum_line else {
        return Err(Error::CacheCorrupt("missing checksum line".into()));
    };
    let computed = format!("{:016x}", fnv1a(body.as_bytes()));
    if recorded != computed {
        return Err(Error::CacheCorrupt(format!(
            "checksum mismatch: recorded {recorded}, computed {computed}"
        )));
    }
    if raw.len() as u64 != n_max + 1 {
        return Err(Error::CacheCorrupt(format!(
            "expected {} values, found {}",
            n_max + 1,
            raw.len()
        )));
    }
    let values = if ell == 0 {
        TableValues::Exact(
            raw.iter()
                .map(|s| {
                    s.parse::<BigUint>()
                        .map_err(|_| Error::CacheCorrupt(format!("bad value {s}")))
                })
                .collect::<Result<Vec<_>>>()?,
        )
    } else {
        TableValues::Mod(
            raw.iter()
                .map(|s| {
                    s.parse::<u64>()
                        .map_err(|_| Error::CacheCorrupt(format!("bad value {s}")))
                })
                .collect::<Result<Vec<_>>>()?,
        )
    };
    Ok(PartitionTable {
        r,
        ell: if ell == 0 { None } else { Some(ell) },
        values,
    })
}
