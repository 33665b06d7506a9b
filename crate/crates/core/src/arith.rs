//! Modular arithmetic, quadratic symbols, and divisor-sum sieves.
//!
//! Everything here is exact integer arithmetic: field elements are canonical
//! representatives in `[0, ell)`, and divisor sums are plain `u64` values.

use crate::error::{Error, Result};

/// A prime field `Z/ell` with `ell >= 5`.
///
/// The lower bound keeps 24 invertible, which the `q^{N/24}` grid relies on
/// throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    ell: u64,
}

impl PrimeField {
    pub fn new(ell: u64) -> Result<Self> {
        if ell < 5 || !is_prime(ell) {
            return Err(Error::InvalidArgument(format!(
                "modulus {ell} must be a prime >= 5"
            )));
        }
        if ell >= 1 << 31 {
            return Err(Error::InvalidArgument(format!(
                "modulus {ell} too large (must fit in 31 bits)"
            )));
        }
        Ok(PrimeField { ell })
    }

    #[inline]
    pub fn ell(&self) -> u64 {
        self.ell
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.ell {
            s - self.ell
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            self.ell - b + a
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.ell - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.ell
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        base %= self.ell;
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> Result<u64> {
        let a = a % self.ell;
        if a == 0 {
            return Err(Error::NonInvertible(0, self.ell));
        }
        Ok(self.pow(a, self.ell - 2))
    }

    /// Canonical representative of a signed integer.
    #[inline]
    pub fn reduce(&self, a: i64) -> u64 {
        let m = self.ell as i64;
        let r = a % m;
        if r < 0 {
            (r + m) as u64
        } else {
            r as u64
        }
    }

    pub fn reduce_i128(&self, a: i128) -> u64 {
        let m = self.ell as i128;
        let r = a % m;
        if r < 0 {
            (r + m) as u64
        } else {
            r as u64
        }
    }
}

/// Modular inverse of `a` mod `ell` for prime `ell`.
pub fn inv_mod(a: i64, ell: u64) -> Result<u64> {
    let f = PrimeField::new(ell)?;
    let a = f.reduce(a);
    if a == 0 {
        return Err(Error::NonInvertible(0, ell));
    }
    f.inv(a)
}

/// Kronecker symbol `(a|n)`, the total extension of the Legendre symbol.
///
/// Defined for all integers `a`, `n`, including `n` even, zero, or negative.
pub fn kronecker(a: i64, n: i64) -> i32 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut a = a;
    let mut n = n;
    let mut k = 1i32;
    if n < 0 {
        n = -n;
        if a < 0 {
            k = -k;
        }
    }
    // split off the even part of n: (a|2) depends on a mod 8
    while n % 2 == 0 {
        n /= 2;
        if a % 2 == 0 {
            return 0;
        }
        let m = a.rem_euclid(8);
        if m == 3 || m == 5 {
            k = -k;
        }
    }
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let m = n.rem_euclid(8);
            if m == 3 || m == 5 {
                k = -k;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            k = -k;
        }
        a %= n;
    }
    if n == 1 {
        k
    } else {
        0
    }
}

/// Trial-division primality test. Fine for the desk-scale bounds in this crate.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    if n % 3 == 0 {
        return n == 3;
    }
    let mut d = 5u64;
    while d * d <= n {
        if n % d == 0 || n % (d + 2) == 0 {
            return false;
        }
        d += 6;
    }
    true
}

/// All primes in `[lo, hi]`, ascending.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    if hi < 2 || hi < lo {
        return Vec::new();
    }
    let n = hi as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    if n >= 1 {
        sieve[1] = false;
    }
    let mut i = 2usize;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (lo.max(2)..=hi).filter(|&p| sieve[p as usize]).collect()
}

/// Table of divisor sums `sigma(n) = sum of d | n` for `1 <= n <= n_max`.
///
/// Entry 0 is unused and set to 0. Values are exact integers, not reduced,
/// so one table serves every modulus.
#[derive(Debug, Clone)]
pub struct SigmaTable {
    values: Vec<u64>,
}

impl SigmaTable {
    pub fn n_max(&self) -> u64 {
        self.values.len() as u64 - 1
    }

    #[inline]
    pub fn get(&self, n: u64) -> u64 {
        self.values[n as usize]
    }
}

/// Build a [`SigmaTable`] by divisor enumeration in `O(n log n)`.
pub fn sigma_sieve(n_max: u64) -> Result<SigmaTable> {
    if n_max < 1 {
        return Err(Error::InvalidArgument(
            "sigma sieve needs n_max >= 1".into(),
        ));
    }
    let n = n_max as usize;
    let mut values = vec![0u64; n + 1];
    for d in 1..=n {
        let mut m = d;
        while m <= n {
            values[m] += d as u64;
            m += d;
        }
    }
    Ok(SigmaTable { values })
}
