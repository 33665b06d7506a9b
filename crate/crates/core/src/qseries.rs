//! Dense q-expansion arithmetic over `Z/ell` on the `q^{N/24}` exponent grid.
//!
//! A [`Q24Series`] stores coefficients `a(N)` for grid indices `N` in a
//! contiguous window `[start, trunc]`. The convention everywhere is:
//!
//! * `a(N) = 0` is known for every `N < start`;
//! * `a(N)` is stored for `start <= N <= trunc`;
//! * nothing is known beyond `trunc`.
//!
//! Every operation tracks the window on which its result is valid, so a
//! silently-truncated product cannot masquerade as exact data. Windows may
//! legitimately be empty (e.g. after a `U_m` of a short series); an empty
//! series still carries the "zero below `start`" fact.
//!
//! Eisenstein-free integer-grid series (partition tables, Euler products)
//! reuse this type with indices read as plain exponents; the `/24` meaning
//! only matters to the operators `U_m`, `V_m`, twist, and theta.

use crate::arith::{inv_mod, is_prime, kronecker, PrimeField};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Q24Series {
    field: PrimeField,
    start: i64,
    coeffs: Vec<u64>,
}

impl Q24Series {
    /// Wrap raw coefficients; values are reduced into `[0, ell)`.
    pub fn new(ell: u64, start: i64, coeffs: Vec<u64>) -> Result<Self> {
        let field = PrimeField::new(ell)?;
        let coeffs = coeffs.into_iter().map(|c| c % ell).collect();
        Ok(Q24Series {
            field,
            start,
            coeffs,
        })
    }

    pub fn from_signed(ell: u64, start: i64, coeffs: &[i64]) -> Result<Self> {
        let field = PrimeField::new(ell)?;
        let coeffs = coeffs.iter().map(|&c| field.reduce(c)).collect();
        Ok(Q24Series {
            field,
            start,
            coeffs,
        })
    }

    /// The zero series, known to vanish through `trunc`.
    pub fn zero_through(ell: u64, trunc: i64) -> Result<Self> {
        Ok(Q24Series {
            field: PrimeField::new(ell)?,
            start: trunc + 1,
            coeffs: Vec::new(),
        })
    }

    /// The constant series 1, valid through `trunc`.
    pub fn one(ell: u64, trunc: i64) -> Result<Self> {
        Self::monomial(ell, 0, 1, trunc)
    }

    /// `c * q^{n/24}`, valid through `trunc >= n`.
    pub fn monomial(ell: u64, n: i64, c: u64, trunc: i64) -> Result<Self> {
        if trunc < n {
            return Err(Error::InsufficientPrecision {
                needed: n,
                have: trunc,
            });
        }
        let mut coeffs = vec![0u64; (trunc - n + 1) as usize];
        coeffs[0] = c % ell;
        Q24Series::new(ell, n, coeffs)
    }

    #[inline]
    pub fn ell(&self) -> u64 {
        self.field.ell()
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn start(&self) -> i64 {
        self.start
    }

    /// Largest grid index with a known coefficient (`start - 1` when empty).
    #[inline]
    pub fn trunc(&self) -> i64 {
        self.start + self.coeffs.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient at grid index `n`: `Some(0)` below the window, `None` above it.
    #[inline]
    pub fn coeff(&self, n: i64) -> Option<u64> {
        if n < self.start {
            Some(0)
        } else if n > self.trunc() {
            None
        } else {
            Some(self.coeffs[(n - self.start) as usize])
        }
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// Nonzero `(index, value)` pairs in the stored window.
    pub fn nonzero(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(move |(i, &c)| (self.start + i as i64, c))
    }

    /// Smallest index with a nonzero coefficient, if any is stored.
    pub fn ord(&self) -> Option<i64> {
        self.nonzero().next().map(|(n, _)| n)
    }

    /// True when every stored coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Restrict the valid window to `new_trunc` (no-op if already shorter).
    pub fn truncated(mut self, new_trunc: i64) -> Self {
        if new_trunc < self.trunc() {
            let keep = (new_trunc - self.start + 1).max(0) as usize;
            self.coeffs.truncate(keep);
            if self.coeffs.is_empty() {
                self.start = new_trunc + 1;
            }
        }
        self
    }

    /// The residue class mod 24 shared by all nonzero indices, when unique.
    pub fn support_class_24(&self) -> Option<u8> {
        let mut class: Option<u8> = None;
        for (n, _) in self.nonzero() {
            let c = n.rem_euclid(24) as u8;
            match class {
                None => class = Some(c),
                Some(prev) if prev != c => return None,
                _ => {}
            }
        }
        class
    }

    fn check_same_field(&self, other: &Self) -> Result<()> {
        if self.ell() != other.ell() {
            return Err(Error::ModulusMismatch(self.ell(), other.ell()));
        }
        Ok(())
    }

    /// Cauchy product. Exponents add; the result is valid through
    /// `min(f.trunc + g.start, g.trunc + f.start)`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_field(other)?;
        let ell = self.ell();
        let start = self.start + other.start;
        let trunc = (self.trunc() + other.start).min(other.trunc() + self.start);
        if trunc < start {
            return Ok(Q24Series {
                field: self.field,
                start: trunc + 1,
                coeffs: Vec::new(),
            });
        }
        let len = (trunc - start + 1) as usize;
        // skip zero terms: eta powers and theta series are very sparse on this grid
        let a: Vec<(usize, u64)> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (i, c))
            .collect();
        let b: Vec<(usize, u64)> = other
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (i, c))
            .collect();
        // small moduli fit u64 accumulators: terms are < ell^2 < 2^42 and at
        // most 2^20 of them land in one output cell
        let small = ell < 1 << 21
            && len <= 1 << 20
            && self.coeffs.len() <= 1 << 20
            && other.coeffs.len() <= 1 << 20;
        let coeffs: Vec<u64> = if small {
            let mut acc64 = vec![0u64; len];
            for &(i, ci) in &a {
                if i >= len {
                    break;
                }
                let room = len - i;
                for &(j, cj) in &b {
                    if j >= room {
                        break;
                    }
                    acc64[i + j] += ci * cj;
                }
            }
            acc64.into_iter().map(|v| v % ell).collect()
        } else {
            let mut acc = vec![0u128; len];
            for &(i, ci) in &a {
                if i >= len {
                    break;
                }
                let room = len - i;
                for &(j, cj) in &b {
                    if j >= room {
                        break;
                    }
                    acc[i + j] += (ci as u128) * (cj as u128);
                }
            }
            acc.into_iter().map(|v| (v % ell as u128) as u64).collect()
        };
        Ok(Q24Series {
            field: self.field,
            start,
            coeffs,
        })
    }

    /// Multiplicative inverse as a Laurent-type expansion, valid through
    /// `out_trunc`. Requires the input window to reach `out_trunc + 2*ord`.
    pub fn inv(&self, out_trunc: i64) -> Result<Self> {
        let ord = self.ord().ok_or(Error::NonInvertibleSeries)?;
        let lead = self.coeff(ord).unwrap();
        let lead_inv = self.field.inv(lead)?;
        let res_start = -ord;
        let out_len = out_trunc - res_start + 1;
        if out_len <= 0 {
            return Ok(Q24Series {
                field: self.field,
                start: out_trunc + 1,
                coeffs: Vec::new(),
            });
        }
        let needed = ord + out_len - 1;
        if self.trunc() < needed {
            return Err(Error::InsufficientPrecision {
                needed,
                have: self.trunc(),
            });
        }
        let out_len = out_len as usize;
        // shifted view f = q^{ord/24} * F with F[0] invertible
        let fs: Vec<(usize, u64)> = (1..out_len)
            .filter_map(|k| {
                let c = self.coeff(ord + k as i64).unwrap();
                (c != 0).then_some((k, c))
            })
            .collect();
        let ell = self.ell();
        let mut g = vec![0u64; out_len];
        g[0] = lead_inv;
        // small moduli fit a u64 accumulator: terms are < ell^2 and at most
        // out_len <= 2^20 of them are summed, so ell < 2^21 cannot overflow
        if ell < 1 << 21 && out_len <= 1 << 20 {
            for n in 1..out_len {
                let mut s: u64 = 0;
                for &(k, fk) in &fs {
                    if k > n {
                        break;
                    }
                    s += fk * g[n - k];
                }
                g[n] = self.field.mul(self.field.neg(s % ell), lead_inv);
            }
        } else {
            for n in 1..out_len {
                let mut s: u128 = 0;
                for &(k, fk) in &fs {
                    if k > n {
                        break;
                    }
                    s += (fk as u128) * (g[n - k] as u128);
                }
                let s = (s % ell as u128) as u64;
                g[n] = self.field.mul(self.field.neg(s), lead_inv);
            }
        }
        Ok(Q24Series {
            field: self.field,
            start: res_start,
            coeffs: g,
        })
    }

    /// Binary exponentiation with eager re-truncation to `out_trunc`.
    pub fn pow(&self, e: u64, out_trunc: i64) -> Result<Self> {
        if e == 0 {
            return Q24Series::one(self.ell(), out_trunc);
        }
        let mut base = self.clone().truncated(out_trunc);
        let mut acc: Option<Q24Series> = None;
        let mut e = e;
        loop {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base)?.truncated(out_trunc),
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.mul(&base)?.truncated(out_trunc);
        }
        Ok(acc.unwrap())
    }

    /// `U_m`: contraction `a(N) -> a(mN)`.
    pub fn u_op(&self, m: u64) -> Self {
        assert!(m >= 1);
        let m = m as i64;
        let start = self.start.div_euclid(m) + if self.start.rem_euclid(m) != 0 { 1 } else { 0 };
        let trunc = self.trunc().div_euclid(m);
        if trunc < start {
            return Q24Series {
                field: self.field,
                start: trunc + 1,
                coeffs: Vec::new(),
            };
        }
        let coeffs = (start..=trunc)
            .map(|n| self.coeff(m * n).unwrap())
            .collect();
        Q24Series {
            field: self.field,
            start,
            coeffs,
        }
    }

    /// `V_m`: dilation `q^{N/24} -> q^{mN/24}`.
    pub fn v_op(&self, m: u64) -> Self {
        assert!(m >= 1);
        let m = m as i64;
        let start = self.start * m;
        let trunc = self.trunc() * m;
        if trunc < start {
            return Q24Series {
                field: self.field,
                start: trunc + 1,
                coeffs: Vec::new(),
            };
        }
        let mut coeffs = vec![0u64; (trunc - start + 1) as usize];
        for (n, c) in self.nonzero() {
            coeffs[(m * n - start) as usize] = c;
        }
        Q24Series {
            field: self.field,
            start,
            coeffs,
        }
    }

    /// Twist by the quadratic character mod a prime `Q >= 5`:
    /// `a(N) -> (N|Q) a(N)`. Kills indices divisible by `Q`.
    pub fn twist(&self, q: u64) -> Result<Self> {
        if q < 5 || !is_prime(q) {
            return Err(Error::InvalidArgument(format!(
                "twist modulus {q} must be a prime >= 5"
            )));
        }
        let mut out = self.clone();
        for i in 0..out.coeffs.len() {
            let n = out.start + i as i64;
            match kronecker(n, q as i64) {
                0 => out.coeffs[i] = 0,
                -1 => out.coeffs[i] = out.field.neg(out.coeffs[i]),
                _ => {}
            }
        }
        Ok(out)
    }

    /// The operator `q d/dq` on the grid: multiplies `a(N)` by `N/24`,
    /// composed `iterations` times.
    pub fn theta_op(&self, iterations: u32) -> Self {
        let ell = self.ell();
        let inv24 = inv_mod(24, ell).expect("24 invertible for ell >= 5");
        let mut out = self.clone();
        for i in 0..out.coeffs.len() {
            if out.coeffs[i] == 0 {
                continue;
            }
            let n = out.field.reduce(out.start + i as i64);
            let factor = out.field.pow(out.field.mul(n, inv24), iterations as u64);
            out.coeffs[i] = out.field.mul(out.coeffs[i], factor);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_field(other)?;
        let start = self.start.min(other.start);
        let trunc = self.trunc().min(other.trunc());
        if trunc < start {
            return Ok(Q24Series {
                field: self.field,
                start: trunc + 1,
                coeffs: Vec::new(),
            });
        }
        let coeffs = (start..=trunc)
            .map(|n| {
                self.field
                    .add(self.coeff(n).unwrap_or(0), other.coeff(n).unwrap_or(0))
            })
            .collect();
        Ok(Q24Series {
            field: self.field,
            start,
            coeffs,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scaled(self.field.neg(1)))
    }

    pub fn scaled(&self, c: u64) -> Self {
        let mut out = self.clone();
        for v in &mut out.coeffs {
            *v = out.field.mul(*v, c);
        }
        out
    }

    /// First index in `[lo, hi]` where the two series differ, or `None` if
    /// they agree on the whole range. Errors when either window is too short.
    pub fn first_mismatch(&self, other: &Self, lo: i64, hi: i64) -> Result<Option<i64>> {
        self.check_same_field(other)?;
        for s in [self, other] {
            if s.trunc() < hi {
                return Err(Error::InsufficientPrecision {
                    needed: hi,
                    have: s.trunc(),
                });
            }
        }
        for n in lo..=hi {
            if self.coeff(n) != other.coeff(n) {
                return Ok(Some(n));
            }
        }
        Ok(None)
    }

    /// Termwise equality on `[min(start), hi]`.
    pub fn agrees_through(&self, other: &Self, hi: i64) -> Result<()> {
        let lo = self.start.min(other.start);
        match self.first_mismatch(other, lo, hi)? {
            None => Ok(()),
            Some(n) => Err(Error::MismatchAt(n)),
        }
    }

    /// True when all stored coefficients through `hi` vanish.
    pub fn is_zero_through(&self, hi: i64) -> Result<bool> {
        if self.trunc() < hi {
            return Err(Error::InsufficientPrecision {
                needed: hi,
                have: self.trunc(),
            });
        }
        Ok(self.nonzero().all(|(n, _)| n > hi))
    }
}

/// Weight/level/multiplier bookkeeping for a series. Purely metadata: the
/// crate never evaluates anything analytically.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeriesMeta {
    /// Twice the weight, so half-integral weights stay exact.
    pub weight_times_2: i64,
    /// Exponent of the eta multiplier, reduced into `[0, 24)`. Determines the
    /// support class mod 24 of the attached expansion.
    pub eta_exponent: u8,
    pub level: u32,
}

impl SeriesMeta {
    pub fn new(weight_times_2: i64, eta_exponent: i64, level: u32) -> Self {
        SeriesMeta {
            weight_times_2,
            eta_exponent: eta_exponent.rem_euclid(24) as u8,
            level,
        }
    }

    /// Check that a series is supported in this metadata's class mod 24.
    pub fn class_consistent(&self, series: &Q24Series) -> bool {
        series
            .nonzero()
            .all(|(n, _)| n.rem_euclid(24) as u8 == self.eta_exponent)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(ell: u64, start: i64, v: &[i64]) -> Q24Series {
        Q24Series::from_signed(ell, start, v).unwrap()
    }

    #[test]
    fn mul_monomials() {
        // q^{1/24} * q^{1/24} = q^{2/24}
        let a = Q24Series::monomial(5, 1, 1, 10).unwrap();
        let b = a.mul(&a).unwrap();
        assert_eq!(b.coeff(2), Some(1));
        assert_eq!(b.ord(), Some(2));
        assert_eq!(b.trunc(), 11);
    }

    #[test]
    fn mul_polynomials_on_integer_grid() {
        // (1 - q)(1 + q + q^2) = 1 - q^3 with q = q^{24/24}
        let mut f_coeffs = vec![0i64; 80];
        f_coeffs[0] = 1;
        f_coeffs[24] = -1;
        let f = s(7, 0, &f_coeffs);
        let mut g_coeffs = vec![0i64; 80];
        g_coeffs[0] = 1;
        g_coeffs[24] = 1;
        g_coeffs[48] = 1;
        let g = s(7, 0, &g_coeffs);
        let prod = f.mul(&g).unwrap();
        assert_eq!(prod.coeff(0), Some(1));
        assert_eq!(prod.coeff(24), Some(0));
        assert_eq!(prod.coeff(48), Some(0));
        assert_eq!(prod.coeff(72), Some(6)); // -1 mod 7
        assert_eq!(prod.trunc(), 79);
    }

    #[test]
    fn mul_window_rule() {
        let f = s(5, 2, &[1, 1, 1]); // valid 2..4
        let g = s(5, -1, &[1, 1]); // valid -1..0
        let p = f.mul(&g).unwrap();
        assert_eq!(p.start(), 1);
        assert_eq!(p.trunc(), (4 + -1).min(0 + 2));
    }

    #[test]
    fn inv_geometric() {
        // 1/(1 - q) = 1 + q + q^2 + ... on the integer grid (step 24)
        let mut v = vec![0i64; 25];
        v[0] = 1;
        v[24] = -1;
        let f = s(13, 0, &v);
        let g = f.inv(24).unwrap();
        assert_eq!(g.coeff(0), Some(1));
        assert_eq!(g.coeff(24), Some(1));
        assert_eq!(g.coeff(1), Some(0));
    }

    #[test]
    fn inv_roundtrip_with_shift() {
        let f = s(11, 3, &[2, 5, 0, 1, 7, 3, 0, 0, 4, 1, 1, 9, 2, 6, 0, 4]);
        let g = f.inv(6).unwrap();
        assert_eq!(g.start(), -3);
        let prod = f.mul(&g).unwrap();
        let one = Q24Series::one(11, prod.trunc()).unwrap();
        assert!(prod.agrees_through(&one, prod.trunc()).is_ok());
    }

    #[test]
    fn inv_insufficient_window() {
        let f = s(5, 2, &[1, 1]);
        // inverse to trunc 10 needs f through 2 + (10+2) = 14
        assert!(matches!(
            f.inv(10),
            Err(Error::InsufficientPrecision { .. })
        ));
    }

    #[test]
    fn pow_basics() {
        let f = s(7, 1, &[1, 2, 3, 4, 5, 6, 0, 1, 2]);
        assert!(f.pow(1, 9).unwrap().agrees_through(&f, 9).is_ok());
        let one = Q24Series::one(7, 20).unwrap();
        assert!(f.pow(0, 20).unwrap().agrees_through(&one, 20).is_ok());
        let sq = f.pow(2, 9).unwrap();
        let direct = f.mul(&f).unwrap().truncated(9);
        assert!(sq.agrees_through(&direct, 9).is_ok());
    }

    #[test]
    fn u_op_examples() {
        // (q^{5/24} + q^{10/24}) | U_5 = q^{1/24} + q^{2/24}
        let f = s(7, 5, &[1, 0, 0, 0, 0, 1]);
        let g = f.u_op(5);
        assert_eq!(g.coeff(1), Some(1));
        assert_eq!(g.coeff(2), Some(1));
        assert_eq!(g.start(), 1);
        assert_eq!(g.trunc(), 2);
        // U_1 is the identity
        let h = f.u_op(1);
        assert!(h.agrees_through(&f, f.trunc()).is_ok());
    }

    #[test]
    fn u_op_negative_start() {
        let f = s(5, -7, &[1, 2, 3, 4, 0, 1, 2, 3, 4, 0, 1, 2, 3, 4, 2]);
        let g = f.u_op(3);
        // ceil(-7/3) = -2, floor(7/3) = 2
        assert_eq!(g.start(), -2);
        assert_eq!(g.trunc(), 2);
        for n in -2i64..=2 {
            assert_eq!(g.coeff(n), f.coeff(3 * n));
        }
    }

    #[test]
    fn v_then_u_is_identity() {
        let f = s(11, -3, &[5, 0, 2, 8, 1, 0, 0, 3, 9]);
        for m in [2u64, 3, 5, 7] {
            let g = f.v_op(m).u_op(m);
            assert!(g.agrees_through(&f, f.trunc()).is_ok(), "m={m}");
        }
    }

    #[test]
    fn twist_examples() {
        // (q^{1/24} + q^{5/24}) twisted by chi_5 keeps N=1, kills N=5
        let f = s(7, 1, &[1, 0, 0, 0, 1]);
        let g = f.twist(5).unwrap();
        assert_eq!(g.coeff(1), Some(1));
        assert_eq!(g.coeff(5), Some(0));
        assert!(f.twist(4).is_err());
        assert!(f.twist(3).is_err());
    }

    #[test]
    fn twist_twice_kills_multiples() {
        let f = s(7, 0, &[1, 2, 3, 4, 5, 6, 1, 2, 3, 4, 5, 6, 1, 2, 3]);
        let tt = f.twist(5).unwrap().twist(5).unwrap();
        for n in 0..=f.trunc() {
            let expect = if n % 5 == 0 { 0 } else { f.coeff(n).unwrap() };
            assert_eq!(tt.coeff(n), Some(expect), "n={n}");
        }
    }

    #[test]
    fn theta_op_basics() {
        // theta(q^{24/24}) = 1 * q; theta kills the constant term
        let f = s(
            5,
            0,
            &[
                3, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1,
            ],
        );
        let g = f.theta_op(1);
        assert_eq!(g.coeff(0), Some(0));
        assert_eq!(g.coeff(24), Some(1));
    }

    #[test]
    fn theta_ell_minus_1_fixes_coprime_indices() {
        // on the integer grid, theta^{ell-1} multiplies a(24n) by n^{ell-1}:
        // 1 if gcd(n, ell) = 1, else 0
        let ell = 7u64;
        let mut coeffs = vec![0i64; 24 * 10 + 1];
        for n in 0..=10 {
            coeffs[24 * n] = (n + 1) as i64;
        }
        let f = s(ell, 0, &coeffs);
        let g = f.theta_op((ell - 1) as u32);
        for n in 0..=10i64 {
            let expect = if n % ell as i64 == 0 {
                0
            } else {
                f.coeff(24 * n).unwrap()
            };
            assert_eq!(g.coeff(24 * n), Some(expect), "n={n}");
        }
    }

    #[test]
    fn add_and_window() {
        let f = s(5, 0, &[1, 2, 3]);
        let g = s(5, 2, &[4, 4, 4]);
        let h = f.add(&g).unwrap();
        assert_eq!(h.start(), 0);
        assert_eq!(h.trunc(), 2);
        assert_eq!(h.coeff(2), Some(2)); // 3 + 4 mod 5
        assert_eq!(h.coeff(1), Some(2));
    }

    #[test]
    fn support_class_detection() {
        let f = s(
            5,
            1,
            &[
                1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 4,
            ],
        );
        assert_eq!(f.support_class_24(), Some(1));
        let g = s(5, 1, &[1, 1]);
        assert_eq!(g.support_class_24(), None);
    }

    #[test]
    fn modulus_mismatch_rejected() {
        let f = s(5, 0, &[1]);
        let g = s(7, 0, &[1]);
        assert!(matches!(f.mul(&g), Err(Error::ModulusMismatch(5, 7))));
    }

    #[test]
    fn empty_windows_are_sound() {
        let f = s(5, 6, &[1, 2, 3, 4]); // valid 6..9
        let g = f.u_op(5); // ceil(6/5)=2, floor(9/5)=1: empty
        assert!(g.is_empty());
        assert_eq!(g.coeff(0), Some(0)); // still knows zeros below start
        assert_eq!(g.coeff(2), None);
    }
}
