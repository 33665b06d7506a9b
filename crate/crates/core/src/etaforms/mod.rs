//! Canonical expansions: Dedekind eta powers, the discriminant, Eisenstein
//! series, theta-series shapes, and the level-1 linear algebra built on them.
//!
//! Eta lives on the `q^{N/24}` grid with support on perfect squares; theta
//! shapes are the four support/coefficient patterns that show up as
//! right-hand sides of the congruences this crate verifies.

mod spaces;

pub use spaces::{
    cusp_member, dim_cusp, dim_modular, filtration, form_space, miller_basis, CuspCertificate,
    FormSpace,
};

use crate::arith::kronecker;
use crate::error::{Error, Result};
use crate::qseries::Q24Series;
use num_bigint::BigInt;

/// Dedekind eta to grid index `trunc`, by the pentagonal-number expansion:
/// sign `(-1)^k` at `N = (6k-1)^2` for `k` over the integers.
pub fn eta_series(ell: u64, trunc: i64) -> Result<Q24Series> {
    if trunc < 1 {
        return Q24Series::zero_through(ell, trunc);
    }
    let mut coeffs = vec![0u64; trunc as usize];
    let mut k: i64 = 0;
    loop {
        let mut hit = false;
        for n in [6 * k - 1, -6 * k - 1] {
            let idx = n * n;
            if idx <= trunc {
                hit = true;
                let sign: i64 = if k % 2 == 0 { 1 } else { -1 };
                coeffs[(idx - 1) as usize] = if sign == 1 { 1 } else { ell - 1 };
            }
            if k == 0 {
                break; // 6*0-1 and -6*0-1 give the same square
            }
        }
        if !hit {
            break;
        }
        k += 1;
    }
    Q24Series::new(ell, 1, coeffs)
}

/// Theta form of eta: `sum_n (12|n) q^{n^2/24}`. Independent of
/// [`eta_series`]; the two are compared termwise in tests.
pub fn eta_theta_expansion(ell: u64, trunc: i64) -> Result<Q24Series> {
    shape_reference(ThetaKind::Eta, ell, trunc)
}

/// Theta form of eta cubed: `sum_n (-4|n) n q^{3n^2/24}`.
pub fn eta3_theta_expansion(ell: u64, trunc: i64) -> Result<Q24Series> {
    shape_reference(ThetaKind::Eta3, ell, trunc)
}

/// `eta^e` mod `ell` through grid index `trunc`; `e` may be negative.
pub fn eta_pow(e: i64, ell: u64, trunc: i64) -> Result<Q24Series> {
    if e >= 0 {
        eta_series(ell, trunc)?.pow(e as u64, trunc)
    } else {
        let a = -e; // eta^a starts at grid index a, so invert with extra room
        let deep = trunc + 2 * a;
        eta_series(ell, deep)?.pow(a as u64, deep)?.inv(trunc)
    }
}

/// Euler product `prod_{n>=1} (1 - q^n)` mod `ell` on the *integer* grid
/// (index = exponent of `q`). Partition tables are inverses of powers of
/// this series.
pub fn euler_product(ell: u64, n_max: i64) -> Result<Q24Series> {
    let mut coeffs = vec![0i64; (n_max.max(0) + 1) as usize];
    coeffs[0] = 1;
    let mut k: i64 = 1;
    loop {
        let g1 = k * (3 * k - 1) / 2;
        let g2 = k * (3 * k + 1) / 2;
        if g1 > n_max && g2 > n_max {
            break;
        }
        let sign = if k % 2 == 0 { 1 } else { -1 };
        if g1 <= n_max {
            coeffs[g1 as usize] = sign;
        }
        if g2 <= n_max {
            coeffs[g2 as usize] = sign;
        }
        k += 1;
    }
    Q24Series::from_signed(ell, 0, &coeffs)
}

/// Exact integer Eisenstein series `E4 = 1 + 240 sum sigma_3(n) q^n` and
/// `E6 = 1 - 504 sum sigma_5(n) q^n`, on the integer grid through `trunc`.
pub fn e4_e6_series(trunc: usize) -> (Vec<BigInt>, Vec<BigInt>) {
    let mut s3 = vec![0u128; trunc + 1];
    let mut s5 = vec![0u128; trunc + 1];
    for d in 1..=trunc as u128 {
        let d3 = d * d * d;
        let d5 = d3 * d * d;
        let mut m = d as usize;
        while m <= trunc {
            s3[m] += d3;
            s5[m] += d5;
            m += d as usize;
        }
    }
    let mut e4 = vec![BigInt::from(0); trunc + 1];
    let mut e6 = vec![BigInt::from(0); trunc + 1];
    e4[0] = BigInt::from(1);
    e6[0] = BigInt::from(1);
    for n in 1..=trunc {
        e4[n] = BigInt::from(240u32) * BigInt::from(s3[n]);
        e6[n] = BigInt::from(-504i32) * BigInt::from(s5[n]);
    }
    (e4, e6)
}

/// The four theta-series patterns that occur as congruence right-hand sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaKind {
    /// support `N = n^2`, coefficient `(12|n)`
    Eta,
    /// support `N = 3n^2`, coefficient `(-4|n) n`
    Eta3,
    /// support `N = ell * n^2`, coefficient `(12|n)`; equals `eta^ell` mod `ell`
    EtaEll,
    /// `(12|ell) eta^{ell^2} - eta`: support `N = n^2` with `ell` not dividing
    /// `n`, coefficient `-(12|n)`
    EtaEll2MinusEta,
}

impl ThetaKind {
    pub fn label(&self) -> &'static str {
        match self {
            ThetaKind::Eta => "eta",
            ThetaKind::Eta3 => "eta3",
            ThetaKind::EtaEll => "eta_ell",
            ThetaKind::EtaEll2MinusEta => "eta_ell2_minus_eta",
        }
    }

    /// The quadratic stretch `b` of the support `{b n^2}`.
    pub fn stretch(&self, ell: u64) -> u64 {
        match self {
            ThetaKind::Eta | ThetaKind::EtaEll2MinusEta => 1,
            ThetaKind::Eta3 => 3,
            ThetaKind::EtaEll => ell,
        }
    }
}

/// A detected theta-series shape: `scalar` times the normalized pattern of
/// `kind`, supported on `b n^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThetaShape {
    pub b: u64,
    pub kind: ThetaKind,
    pub scalar: u64,
}

/// Normalized (`scalar = 1`) expansion of a shape through `trunc`.
pub fn shape_reference(kind: ThetaKind, ell: u64, trunc: i64) -> Result<Q24Series> {
    let b = kind.stretch(ell) as i64;
    if trunc < b {
        return Q24Series::zero_through(ell, trunc);
    }
    let mut coeffs = vec![0i64; (trunc - b + 1) as usize];
    let mut n: i64 = 1;
    while b * n * n <= trunc {
        let idx = (b * n * n - b) as usize;
        match kind {
            ThetaKind::Eta | ThetaKind::EtaEll => {
                coeffs[idx] = kronecker(12, n) as i64;
            }
            ThetaKind::Eta3 => {
                coeffs[idx] = kronecker(-4, n) as i64 * n;
            }
            ThetaKind::EtaEll2MinusEta => {
                if n % ell as i64 != 0 {
                    coeffs[idx] = -(kronecker(12, n) as i64);
                }
            }
        }
        n += 1;
    }
    Q24Series::from_signed(ell, b, &coeffs)
}

fn squarefree_part(mut n: u64) -> u64 {
    let mut sf = 1u64;
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            if e % 2 == 1 {
                sf *= d;
            }
        }
        d += 1;
    }
    sf * n
}

/// Detect whether `f` is one of the four theta shapes.
///
/// Finds the minimal `b` with every nonzero index of the form `b n^2`, then
/// matches coefficients against each pattern. Needs at least 5 nonzero terms
/// to rule on a shape; fewer is an error distinct from a clean "no shape".
pub fn theta_detect(f: &Q24Series) -> Result<Option<ThetaShape>> {
    let nz: Vec<(i64, u64)> = f.nonzero().collect();
    if nz.len() < 5 {
        return Err(Error::InsufficientData {
            needed: 5,
            have: nz.len(),
        });
    }
    if nz.iter().any(|&(n, _)| n <= 0) {
        return Ok(None);
    }
    // minimal b: the squarefree kernel, which must be shared by all indices
    let b = squarefree_part(nz[0].0 as u64);
    for &(n, _) in &nz[1..] {
        if squarefree_part(n as u64) != b {
            return Ok(None);
        }
    }
    let ell = f.ell();
    let field = f.field();
    let (n0, c0) = nz[0];
    for kind in [
        ThetaKind::Eta,
        ThetaKind::Eta3,
        ThetaKind::EtaEll,
        ThetaKind::EtaEll2MinusEta,
    ] {
        if kind.stretch(ell) != b {
            continue;
        }
        let reference = shape_reference(kind, ell, f.trunc())?;
        let lead = match reference.coeff(n0) {
            Some(c) if c != 0 => c,
            _ => continue,
        };
        let scalar = field.mul(c0, field.inv(lead)?);
        let cand = reference.scaled(scalar);
        let lo = f.start().min(cand.start());
        if f.first_mismatch(&cand, lo, f.trunc())?.is_none() {
            return Ok(Some(ThetaShape { b, kind, scalar }));
        }
    }
    Ok(None)
}
