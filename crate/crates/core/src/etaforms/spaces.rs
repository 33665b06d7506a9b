//! Level-1 modular forms mod `ell` as explicit coefficient matrices.
//!
//! A weight-`k` space is represented by the monomial family
//! `E4^a E6^b Delta^c` with `4a + 6b + 12c = k` and `b <= 1`; the family has
//! exactly `dim M_k` members, one of each vanishing order `c`, so leading
//! coefficients are unit-triangular and membership questions reduce to
//! Gaussian elimination over `F_ell`.

use super::eta_pow;
use crate::arith::PrimeField;
use crate::error::{Error, Result};
use crate::qseries::Q24Series;

/// `dim M_k` for even `k >= 0`.
pub fn dim_modular(k: u32) -> usize {
    assert!(k % 2 == 0);
    if k % 12 == 2 {
        (k / 12) as usize
    } else {
        (k / 12) as usize + 1
    }
}

/// `dim S_k = dim M_k - 1` when the space is nontrivial.
pub fn dim_cusp(k: u32) -> usize {
    dim_modular(k).saturating_sub(1)
}

/// Monomial coefficient matrix for the weight-`k` space mod `ell`, with
/// q-expansions on the integer grid through `trunc`.
#[derive(Debug, Clone)]
pub struct FormSpace {
    pub weight: u32,
    pub ell: u64,
    pub trunc: usize,
    /// exponent triples `(a, b, c)` of `E4^a E6^b Delta^c`, ordered by `c`
    pub monomials: Vec<(u32, u32, u32)>,
    /// one q-expansion per monomial, length `trunc + 1`
    pub rows: Vec<Vec<u64>>,
    pub dim_m: usize,
    pub dim_s: usize,
}

fn sigma_pow_mod(ell: u64, trunc: usize, e: u32) -> Vec<u64> {
    let field = PrimeField::new(ell).unwrap();
    let mut out = vec![0u64; trunc + 1];
    for d in 1..=trunc as u64 {
        let dp = field.pow(d % ell, e as u64);
        let mut m = d as usize;
        while m <= trunc {
            out[m] = field.add(out[m], dp);
            m += d as usize;
        }
    }
    out
}

fn mul_int_grid(field: PrimeField, a: &[u64], b: &[u64], trunc: usize) -> Vec<u64> {
    let ell = field.ell();
    let mut acc = vec![0u128; trunc + 1];
    for (i, &ai) in a.iter().enumerate().take(trunc + 1) {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate().take(trunc + 1 - i) {
            if bj != 0 {
                acc[i + j] += (ai as u128) * (bj as u128);
            }
        }
    }
    acc.into_iter().map(|v| (v % ell as u128) as u64).collect()
}

fn e4_mod(field: PrimeField, trunc: usize) -> Vec<u64> {
    let ell = field.ell();
    let s3 = sigma_pow_mod(ell, trunc, 3);
    let mut out = vec![0u64; trunc + 1];
    out[0] = 1;
    for n in 1..=trunc {
        out[n] = field.mul(240 % ell, s3[n]);
    }
    out
}

fn e6_mod(field: PrimeField, trunc: usize) -> Vec<u64> {
    let ell = field.ell();
    let s5 = sigma_pow_mod(ell, trunc, 5);
    let mut out = vec![0u64; trunc + 1];
    out[0] = 1;
    for n in 1..=trunc {
        out[n] = field.mul(field.neg(504 % ell), s5[n]);
    }
    out
}

fn delta_mod(ell: u64, trunc: usize) -> Result<Vec<u64>> {
    // Delta = q prod (1-q^n)^24
    let euler = super::euler_product(ell, trunc as i64)?;
    let p24 = euler.pow(24, trunc as i64)?;
    let mut out = vec![0u64; trunc + 1];
    for n in 1..=trunc {
        out[n] = p24.coeff(n as i64 - 1).unwrap_or(0);
    }
    Ok(out)
}

/// Build the weight-`k` monomial space mod `ell`.
pub fn form_space(k: u32, ell: u64, trunc: usize) -> Result<FormSpace> {
    if k % 2 != 0 {
        return Err(Error::InvalidArgument(format!("weight {k} must be even")));
    }
    let field = PrimeField::new(ell)?;
    let dim_m = dim_modular(k);
    let dim_s = dim_cusp(k);
    if trunc < dim_m + 1 {
        return Err(Error::InsufficientPrecision {
            needed: (dim_m + 1) as i64,
            have: trunc as i64,
        });
    }
    let mut monomials = Vec::new();
    for c in 0..=(k / 12) {
        let w = k - 12 * c;
        if w % 4 == 0 {
            monomials.push((w / 4, 0, c));
        } else if w % 4 == 2 && w >= 6 {
            monomials.push(((w - 6) / 4, 1, c));
        }
    }
    debug_assert_eq!(
        monomials.len(),
        dim_m,
        "monomial count vs dimension at k={k}"
    );

    let e4 = e4_mod(field, trunc);
    let e6 = e6_mod(field, trunc);
    let delta = delta_mod(ell, trunc)?;

    // powers of E4 are reused across monomials; Delta powers grow with c
    let mut rows = Vec::with_capacity(monomials.len());
    let mut delta_pow = vec![0u64; trunc + 1];
    delta_pow[0] = 1;
    let mut current_c = 0u32;
    for &(a, b, c) in &monomials {
        while current_c < c {
            delta_pow = mul_int_grid(field, &delta_pow, &delta, trunc);
            current_c += 1;
        }
        let mut row = delta_pow.clone();
        let mut e4_left = a;
        let mut e4_sq = e4.clone();
        while e4_left > 0 {
            if e4_left & 1 == 1 {
                row = mul_int_grid(field, &row, &e4_sq, trunc);
            }
            e4_left >>= 1;
            if e4_left > 0 {
                e4_sq = mul_int_grid(field, &e4_sq, &e4_sq, trunc);
            }
        }
        if b == 1 {
            row = mul_int_grid(field, &row, &e6, trunc);
        }
        rows.push(row);
    }
    Ok(FormSpace {
        weight: k,
        ell,
        trunc,
        monomials,
        rows,
        dim_m,
        dim_s,
    })
}

impl FormSpace {
    /// Rank of the coefficient matrix restricted to columns `0..=cols`.
    pub fn rank(&self, cols: usize) -> usize {
        let field = PrimeField::new(self.ell).unwrap();
        let cols = cols.min(self.trunc);
        let mut mat: Vec<Vec<u64>> = self.rows.iter().map(|r| r[..=cols].to_vec()).collect();
        let mut rank = 0usize;
        for col in 0..=cols {
            let Some(pivot) = (rank..mat.len()).find(|&i| mat[i][col] != 0) else {
                continue;
            };
            mat.swap(rank, pivot);
            let inv = field.inv(mat[rank][col]).unwrap();
            for j in col..=cols {
                mat[rank][j] = field.mul(mat[rank][j], inv);
            }
            for i in 0..mat.len() {
                if i != rank && mat[i][col] != 0 {
                    let f = mat[i][col];
                    for j in col..=cols {
                        let t = field.mul(f, mat[rank][j]);
                        mat[i][j] = field.sub(mat[i][j], t);
                    }
                }
            }
            rank += 1;
            if rank == mat.len() {
                break;
            }
        }
        rank
    }

    /// Solve `sum_i x_i row_i = target` on columns `0..=check_through`.
    /// Returns the coordinates when the system is consistent.
    pub fn solve(&self, target: &[u64], check_through: usize) -> Option<Vec<u64>> {
        let field = PrimeField::new(self.ell).unwrap();
        let cols = check_through.min(self.trunc);
        let n_unknowns = self.rows.len();
        // augmented system: columns of the transposed row matrix, then target
        let mut mat: Vec<Vec<u64>> = (0..=cols)
            .map(|j| {
                let mut row: Vec<u64> = self.rows.iter().map(|r| r[j]).collect();
                row.push(*target.get(j).unwrap_or(&0));
                row
            })
            .collect();
        let mut pivot_cols = Vec::new();
        let mut rank = 0usize;
        for col in 0..n_unknowns {
            let Some(p) = (rank..mat.len()).find(|&i| mat[i][col] != 0) else {
                continue;
            };
            mat.swap(rank, p);
            let inv = field.inv(mat[rank][col]).unwrap();
            for j in col..=n_unknowns {
                mat[rank][j] = field.mul(mat[rank][j], inv);
            }
            for i in 0..mat.len() {
                if i != rank && mat[i][col] != 0 {
                    let f = mat[i][col];
                    for j in col..=n_unknowns {
                        let t = field.mul(f, mat[rank][j]);
                        mat[i][j] = field.sub(mat[i][j], t);
                    }
                }
            }
            pivot_cols.push(col);
            rank += 1;
            if rank == mat.len() {
                break;
            }
        }
        // inconsistent if any residual row is (0 ... 0 | nonzero)
        for row in mat.iter().skip(rank) {
            if row[n_unknowns] != 0 {
                return None;
            }
        }
        let mut x = vec![0u64; n_unknowns];
        for (i, &col) in pivot_cols.iter().enumerate() {
            x[col] = mat[i][n_unknowns];
        }
        Some(x)
    }
}

/// Extract integer-grid coefficients `f(24n)` for `0 <= n <= len`. Errors if
/// `f` has support off the integer grid or at negative indices.
fn to_integer_grid(f: &Q24Series, len: usize) -> Result<Vec<u64>> {
    if let Some((n, _)) = f.nonzero().find(|&(n, _)| n < 0 || n % 24 != 0) {
        return Err(Error::InconsistentInput(format!(
            "grid index {n} is not a nonnegative multiple of 24"
        )));
    }
    if f.trunc() < 24 * len as i64 {
        return Err(Error::InsufficientPrecision {
            needed: 24 * len as i64,
            have: f.trunc(),
        });
    }
    Ok((0..=len).map(|n| f.coeff(24 * n as i64).unwrap()).collect())
}

fn int_grid_to_q24(ell: u64, coeffs: &[u64]) -> Result<Q24Series> {
    let trunc = 24 * (coeffs.len() as i64 - 1);
    let mut out = vec![0u64; (trunc + 1) as usize];
    for (n, &c) in coeffs.iter().enumerate() {
        out[24 * n] = c;
    }
    Q24Series::new(ell, 0, out)
}

/// Miller basis of the weight-`k` cusp space: `f_1 .. f_d` with
/// `a_i(j) = delta_{ij}` for `1 <= i, j <= d`.
pub fn miller_basis(k: u32, ell: u64, trunc: usize) -> Result<Vec<Q24Series>> {
    let space = form_space(k, ell, trunc)?;
    let d = space.dim_s;
    if d == 0 {
        return Err(Error::EmptySpace(k));
    }
    let field = PrimeField::new(ell)?;
    // cusp monomials are the rows with c >= 1; row with c = j has order j
    let mut rows: Vec<Vec<u64>> = space
        .monomials
        .iter()
        .zip(&space.rows)
        .filter(|((_, _, c), _)| *c >= 1)
        .map(|(_, r)| r.clone())
        .collect();
    debug_assert_eq!(rows.len(), d);
    // Gauss-Jordan on the leading d x d block (unit triangular by order)
    for i in 0..d {
        let pivot = rows[i][i + 1];
        let inv = field.inv(pivot).unwrap();
        for v in rows[i].iter_mut() {
            *v = field.mul(*v, inv);
        }
        for i2 in 0..d {
            if i2 != i && rows[i2][i + 1] != 0 {
                let f = rows[i2][i + 1];
                let base = rows[i].clone();
                for (j, v) in rows[i2].iter_mut().enumerate() {
                    let t = field.mul(f, base[j]);
                    *v = field.sub(*v, t);
                }
            }
        }
    }
    rows.into_iter().map(|r| int_grid_to_q24(ell, &r)).collect()
}

/// Serre filtration: the smallest `k' = k_start (mod ell-1)`,
/// `0 <= k' <= k_start`, whose weight-`k'` space contains `f`.
///
/// Membership is decided by a linear solve on coefficients up to
/// `k_start/12 + 2`, which pins the form at every candidate weight.
pub fn filtration(f: &Q24Series, k_start: u32, ell: u64) -> Result<u32> {
    if k_start % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "weight {k_start} must be even"
        )));
    }
    let check = (k_start / 12 + 2) as usize;
    let coeffs = to_integer_grid(f, check)?;
    let step = (ell - 1) as u32;
    let mut candidates: Vec<u32> = Vec::new();
    let mut k = k_start;
    loop {
        candidates.push(k);
        if k < step {
            break;
        }
        k -= step;
    }
    candidates.reverse();
    for k_try in candidates {
        let space = form_space(k_try, ell, check + 1)?;
        if space.solve(&coeffs, check).is_some() {
            return Ok(k_try);
        }
    }
    Err(Error::InconsistentInput(format!(
        "series is not a weight-{k_start} form mod {ell} at the checked truncation"
    )))
}

/// Certificate for cusp-space membership after clearing the eta multiplier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CuspCertificate {
    /// integer weight of the space the shifted form landed in
    pub weight: u32,
    /// coordinates in the Miller basis of that space
    pub coords: Vec<u64>,
}

/// Test membership of `f` (supported in class `eta_exp` mod 24, of weight
/// `weight_times_2 / 2`) in the corresponding cusp space by multiplying with
/// `eta^{24 - eta_exp}` and solving in the shifted integer-weight space.
pub fn cusp_member(
    f: &Q24Series,
    weight_times_2: i64,
    eta_exp: u32,
    ell: u64,
) -> Result<Option<CuspCertificate>> {
    if eta_exp >= 24 {
        return Err(Error::InvalidArgument(format!(
            "eta exponent {eta_exp} must lie in [0, 24)"
        )));
    }
    // support must sit in the declared class, else it is no member of anything
    if f.nonzero().any(|(n, _)| n.rem_euclid(24) as u32 != eta_exp) {
        return Ok(None);
    }
    let shift = 24 - eta_exp as i64;
    let doubled = weight_times_2 + shift;
    if doubled % 2 != 0 || doubled < 0 {
        return Ok(None);
    }
    let k = (doubled / 2) as u32;
    if k % 2 != 0 {
        return Ok(None);
    }
    let d = dim_cusp(k);
    if d == 0 {
        // the only member of a trivial space is 0
        return Ok(if f.is_zero() {
            Some(CuspCertificate {
                weight: k,
                coords: Vec::new(),
            })
        } else {
            None
        });
    }
    let shifted = f.mul(&eta_pow(shift, ell, f.trunc().max(shift))?)?;
    let check = (d + 2).max((k / 12 + 2) as usize);
    let coeffs = to_integer_grid(&shifted, check)?;
    if coeffs[0] != 0 {
        return Ok(None);
    }
    let basis = miller_basis(k, ell, check + 1)?;
    let field = PrimeField::new(ell)?;
    // Miller coordinates can be read off a(1)..a(d) directly
    let coords: Vec<u64> = (1..=d).map(|j| coeffs[j]).collect();
    // then every remaining coefficient must match
    for n in 0..=check {
        let mut acc = 0u64;
        for (i, b) in basis.iter().enumerate() {
            acc = field.add(acc, field.mul(coords[i], b.coeff(24 * n as i64).unwrap()));
        }
        if acc != coeffs[n] {
            return Ok(None);
        }
    }
    Ok(Some(CuspCertificate { weight: k, coords }))
}
