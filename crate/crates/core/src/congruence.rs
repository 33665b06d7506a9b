//! The search and verification layer: Ramanujan-type checks, the
//! ruling-out search over `(r, ell, m, delta)` grids, square-class modulus
//! reduction, brute-force verification, and the eta-family and abnormal-case
//! verifiers with their enumerations.

use crate::arith::{kronecker, primes_in};
use crate::error::{Error, Result};
use crate::etaforms::{shape_reference, theta_detect, ThetaKind, ThetaShape};
use crate::partitions::{build_f_cached, TableCache};
use rayon::prelude::*;
use serde::Serialize;
use std::sync::Arc;

/// Tuning knobs for the ruling-out search.
#[derive(Debug, Clone, Copy)]
pub struct SearchParams {
    /// examine at most `factor * m` witness candidates per prime `m`
    pub t_budget_factor: u64,
    /// never enumerate candidate `t` beyond this cap
    pub t_cap: u64,
    /// coefficients probed by the Ramanujan-type congruence check
    pub ram_probe: u64,
    /// a candidate verdict reached after examining at least this many
    /// witness candidates counts as clean even if the `t` cap cut the
    /// enumeration short of the per-`m` budget
    pub min_candidates: usize,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            t_budget_factor: 4,
            t_cap: 100_000,
            ram_probe: 2000,
            min_candidates: 64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictStatus {
    RuledOut,
    Candidate,
    TrivialRamanujan,
}

impl VerdictStatus {
    pub fn label(&self) -> &'static str {
        match self {
            VerdictStatus::RuledOut => "ruled_out",
            VerdictStatus::Candidate => "candidate",
            VerdictStatus::TrivialRamanujan => "trivial_ramanujan",
        }
    }
}

/// Outcome for one `(r, ell, m, delta)` cell of the search grid.
#[derive(Debug, Clone, Serialize)]
pub struct SearchVerdict {
    pub r: u64,
    pub ell: u64,
    pub m: u64,
    pub delta: i8,
    pub status: VerdictStatus,
    /// witness with `(r(r-24t) | m) = +1` and `p_r(t) != 0 mod ell`; when
    /// `m | r` that symbol degenerates and the class is taken from
    /// `(r-24t | m)` instead
    pub t_plus: Option<u64>,
    /// witness with class `-1` mod `m`
    pub t_minus: Option<u64>,
    /// for candidates: the quadratic class mod `m` that produced no witness
    pub surviving: Option<i8>,
    /// true when enumeration ran out of `t` values while the evidence base
    /// was still below the configured floor
    pub budget_limited: bool,
}

/// Quadratic class of a witness candidate mod `m`. The `r` factor is a
/// constant relabeling when `gcd(r, m) = 1` and degenerate when `m | r`,
/// where the class of `r - 24t` itself is the meaningful one.
pub fn witness_class(r: u64, t: u64, m: u64) -> i32 {
    let body = r as i64 - 24 * t as i64;
    if r % m == 0 {
        kronecker(body, m as i64)
    } else {
        kronecker(r as i64 * body, m as i64)
    }
}

/// True when `p_r(t)` vanishes mod `ell` on the first `n_probe` arguments
/// `t` in the quadratic class `(r(r-24t) | ell) = delta`. A single nonzero
/// value decides early.
///
/// For `delta = 0` the class is the single progression `t = r/24 (mod ell)`
/// and vanishing is exactly a Ramanujan-type congruence; for `delta = -1`
/// it is the union of `(ell-1)/2` progressions, and vanishing means each of
/// them is a Ramanujan-type congruence, so every theta-type congruence in
/// the class is trivial.
pub fn delta_progression_vanishes(
    cache: &TableCache,
    r: u64,
    ell: u64,
    delta: i8,
    n_probe: u64,
) -> Result<bool> {
    if r % ell == 0 {
        return Err(Error::ExcludedCase(format!("ell = {ell} divides r = {r}")));
    }
    let in_class: Vec<bool> = (0..ell)
        .map(|t| kronecker(r as i64 * (r as i64 - 24 * t as i64), ell as i64) == delta as i32)
        .collect();
    let mut seen = 0u64;
    let mut t = 0u64;
    let mut table = cache.get_mod(r, ell, 1024.min(n_probe * ell + ell))?;
    while seen < n_probe {
        if in_class[(t % ell) as usize] {
            if t > table.n_max() {
                table = cache.get_mod(r, ell, t.max(2 * table.n_max()))?;
            }
            if table.value_mod(t) != 0 {
                return Ok(false);
            }
            seen += 1;
        }
        t += 1;
    }
    Ok(true)
}

/// True when `p_r` vanishes mod `ell` along the full arithmetic progression
/// `t = r/24 (mod ell)`, probed on the first `n_probe` terms.
pub fn ramanujan_check(cache: &TableCache, r: u64, ell: u64, n_probe: u64) -> Result<bool> {
    delta_progression_vanishes(cache, r, ell, 0, n_probe)
}

/// Lazily extended list of witness candidates for one `(r, ell, delta)`:
/// positive `t` with `(r(r-24t) | ell) = delta` and `p_r(t) != 0 mod ell`.
struct WitnessPool<'a> {
    cache: &'a TableCache,
    r: u64,
    ell: u64,
    delta: i8,
    t_cap: u64,
    found: Vec<u64>,
    next_t: u64,
    exhausted: bool,
}

impl<'a> WitnessPool<'a> {
    fn new(cache: &'a TableCache, r: u64, ell: u64, delta: i8, t_cap: u64) -> Self {
        WitnessPool {
            cache,
            r,
            ell,
            delta,
            t_cap,
            found: Vec::new(),
            next_t: 1,
            exhausted: false,
        }
    }

    /// The `i`-th candidate, or `None` once the `t` cap is exhausted.
    fn get(&mut self, i: usize) -> Result<Option<u64>> {
        while self.found.len() <= i {
            if self.exhausted {
                return Ok(None);
            }
            let mut table = self.cache.get_mod(self.r, self.ell, self.next_t + 512)?;
            loop {
                let t = self.next_t;
                if t > self.t_cap {
                    self.exhausted = true;
                    break;
                }
                if t > table.n_max() {
                    table = self.cache.get_mod(self.r, self.ell, 2 * table.n_max())?;
                }
                self.next_t += 1;
                let sym = kronecker(
                    self.r as i64 * (self.r as i64 - 24 * t as i64),
                    self.ell as i64,
                );
                if sym == self.delta as i32 && table.value_mod(t) != 0 {
                    self.found.push(t);
                    break;
                }
            }
        }
        Ok(Some(self.found[i]))
    }
}

/// Run the ruling-out procedure for one `(r, ell, delta)` against every
/// prime `m` in `[m_min, m_max]` other than `ell`.
///
/// A cell is ruled out once both quadratic classes mod `m` contain a witness
/// `t`; it stays a candidate when one class produced no witness within the
/// budget, and the whole row is trivial when a Ramanujan-type congruence
/// already forces the progression to vanish.
pub fn rule_out_search(
    cache: &TableCache,
    r: u64,
    ell: u64,
    delta: i8,
    m_min: u64,
    m_max: u64,
    params: &SearchParams,
) -> Result<Vec<SearchVerdict>> {
    if r % 2 == 0 {
        return Err(Error::InvalidArgument(format!("r = {r} must be odd")));
    }
    if r % ell == 0 {
        return Err(Error::ExcludedCase(format!("ell = {ell} divides r = {r}")));
    }
    if !matches!(delta, 0 | -1) {
        return Err(Error::InvalidArgument(format!(
            "delta must be 0 or -1 (got {delta})"
        )));
    }
    let ms: Vec<u64> = primes_in(m_min.max(5), m_max)
        .into_iter()
        .filter(|&m| m != ell)
        .collect();
    let mut verdicts = Vec::with_capacity(ms.len());
    // a vanishing progression class makes every congruence in it trivial:
    // each of its mod-ell progressions is then a Ramanujan-type congruence.
    // Triviality is judged per class: a delta = 0 congruence says nothing
    // about the delta = -1 class (and vice versa), which is exactly why
    // pairs with f_0 = 0 can still carry nontrivial delta = -1 congruences.
    if delta_progression_vanishes(cache, r, ell, delta, params.ram_probe)? {
        for m in ms {
            verdicts.push(SearchVerdict {
                r,
                ell,
                m,
                delta,
                status: VerdictStatus::TrivialRamanujan,
                t_plus: None,
                t_minus: None,
                surviving: None,
                budget_limited: false,
            });
        }
        return Ok(verdicts);
    }
    let mut pool = WitnessPool::new(cache, r, ell, delta, params.t_cap);
    for m in ms {
        let budget = (params.t_budget_factor * m) as usize;
        let mut t_plus = None;
        let mut t_minus = None;
        let mut examined = 0usize;
        let mut ran_dry = false;
        for i in 0..budget {
            let Some(t) = pool.get(i)? else {
                ran_dry = true;
                break;
            };
            examined += 1;
            match witness_class(r, t, m) {
                1 if t_plus.is_none() => t_plus = Some(t),
                -1 if t_minus.is_none() => t_minus = Some(t),
                _ => {}
            }
            if t_plus.is_some() && t_minus.is_some() {
                break;
            }
        }
        let verdict = match (t_plus, t_minus) {
            (Some(tp), Some(tm)) => SearchVerdict {
                r,
                ell,
                m,
                delta,
                status: VerdictStatus::RuledOut,
                t_plus: Some(tp),
                t_minus: Some(tm),
                surviving: None,
                budget_limited: false,
            },
            _ => SearchVerdict {
                r,
                ell,
                m,
                delta,
                status: VerdictStatus::Candidate,
                t_plus,
                t_minus,
                surviving: Some(if t_plus.is_none() { 1 } else { -1 }),
                budget_limited: ran_dry && examined < params.min_candidates.min(budget),
            },
        };
        verdicts.push(verdict);
    }
    Ok(verdicts)
}

fn factor_squarefree(m: u64) -> Result<Vec<u64>> {
    let mut mleft = m;
    let mut primes = Vec::new();
    let mut d = 2u64;
    while d * d <= mleft {
        if mleft % d == 0 {
            mleft /= d;
            if mleft % d == 0 {
                return Err(Error::InvalidArgument(format!("{m} is not squarefree")));
            }
            primes.push(d);
        }
        d += 1;
    }
    if mleft > 1 {
        primes.push(mleft);
    }
    Ok(primes)
}

/// Split `m = m' m''` where `m''` collects the prime factors of `m` dividing
/// `r (r - 24t)`. A congruence at modulus `ell * m` is equivalent to one at
/// `ell * m'`.
pub fn reduce_modulus(r: u64, t: u64, m: u64, ell: u64) -> Result<(u64, u64)> {
    if r % 2 == 0 || r % ell == 0 {
        return Err(Error::InvalidArgument(
            "r must be odd and coprime to ell".into(),
        ));
    }
    let g = gcd(m, 6 * ell);
    if g != 1 {
        return Err(Error::InvalidArgument(format!(
            "m = {m} shares the factor {g} with 6*ell"
        )));
    }
    let primes = factor_squarefree(m)?;
    let target = r as i128 * (r as i128 - 24 * t as i128);
    let mut m2 = 1u64;
    for p in primes {
        if target.rem_euclid(p as i128) == 0 {
            m2 *= p;
        }
    }
    Ok((m / m2, m2))
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Check `p_r(ell m n + t) = 0 (mod ell)` for all `0 <= n <= n_max` from a
/// partition table. `m = 1` tests a plain Ramanujan-type progression.
pub fn brute_verify(
    cache: &TableCache,
    r: u64,
    ell: u64,
    m: u64,
    t: u64,
    n_max: u64,
) -> Result<bool> {
    let hi = ell
        .checked_mul(m)
        .and_then(|lm| lm.checked_mul(n_max))
        .and_then(|x| x.checked_add(t))
        .ok_or_else(|| Error::InvalidArgument("argument range overflows".into()))?;
    if hi > 20_000_000 {
        return Err(Error::InvalidArgument(format!(
            "table range {hi} too large for brute verification"
        )));
    }
    let table = cache.get_mod(r, ell, hi)?;
    for n in 0..=n_max {
        if table.value_mod(ell * m * n + t) != 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

// --- Table-1 family enumeration -----------------------------------------

/// One pair of an eta-family line: `r = a(ell-1) - 1` (case 1, shape eta) or
/// `r = a(ell-1) - 3` (case 2, shape eta^3), with `alpha` the leading
/// partition value mod `ell`. `alpha = 0` is exactly the Ramanujan-type case.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FamilyPair {
    pub r: u64,
    pub ell: u64,
    pub a: u64,
    pub case: u8,
    pub alpha: u64,
}

/// A row of the family table for one prime: both cases on the same line
/// parameter and congruence condition.
#[derive(Debug, Clone, Serialize)]
pub struct FamilyRow {
    pub ell: u64,
    pub a: u64,
    /// `ell = 1 (mod condition)` is the side condition of this line
    pub condition: u64,
    pub r1: u64,
    pub r2: Option<u64>,
}

/// Side condition modulus for case 1 at line `a`: `24 / gcd(24, a+1)`.
fn case1_condition(a: u64) -> u64 {
    24 / gcd(24, a + 1)
}

/// A case-1 line applies to `ell` when `a <= 2 ell + 1` and
/// `ell = 1 (mod 24/gcd(24, a+1))`.
pub fn case1_applies(a: u64, ell: u64) -> bool {
    a % 2 == 1 && (3..=23).contains(&a) && a <= 2 * ell + 1 && (ell - 1) % case1_condition(a) == 0
}

/// A case-2 line applies to `ell` when `a <= 2 ell + 1` and
/// `ell = 1 (mod 24/gcd(24, a+3))`.
pub fn case2_applies(a: u64, ell: u64) -> bool {
    a % 2 == 1
        && (1..=19).contains(&a)
        && a <= 2 * ell + 1
        && (ell - 1) % (24 / gcd(24, a + 3)) == 0
}

pub fn family_rows(ell_max: u64) -> Vec<FamilyRow> {
    let mut rows = Vec::new();
    for ell in primes_in(5, ell_max) {
        for a in (3..=23u64).step_by(2) {
            if !case1_applies(a, ell) {
                continue;
            }
            let a2 = a - 2;
            rows.push(FamilyRow {
                ell,
                a,
                condition: case1_condition(a),
                r1: a * (ell - 1) - 1,
                r2: case2_applies(a2, ell).then(|| a2 * (ell - 1) - 3),
            });
        }
    }
    rows
}

/// Leading partition value `alpha = p_r((s ell + r)/24) mod ell` with `s = 1`
/// for case 1 and `s = 3` for case 2; the family congruence is Ramanujan-type
/// exactly when this vanishes.
fn family_alpha(cache: &TableCache, r: u64, ell: u64, case: u8) -> Result<u64> {
    let s = if case == 1 { 1 } else { 3 };
    let num = s * ell + r;
    debug_assert_eq!(num % 24, 0);
    let n_star = num / 24;
    let table = cache.get_mod(r, ell, n_star)?;
    Ok(table.value_mod(n_star))
}

/// Every family pair for primes `5 <= ell <= ell_max`, with leading values.
pub fn family_enumerate(cache: &TableCache, ell_max: u64) -> Result<Vec<FamilyPair>> {
    let rows = family_rows(ell_max);
    let mut jobs: Vec<(u64, u64, u64, u8)> = Vec::new();
    for row in &rows {
        jobs.push((row.r1, row.ell, row.a, 1));
        if let Some(r2) = row.r2 {
            jobs.push((r2, row.ell, row.a - 2, 2));
        }
    }
    let pairs: Result<Vec<FamilyPair>> = jobs
        .par_iter()
        .map(|&(r, ell, a, case)| {
            let alpha = family_alpha(cache, r, ell, case)?;
            Ok(FamilyPair {
                r,
                ell,
                a,
                case,
                alpha,
            })
        })
        .collect();
    let mut pairs = pairs?;
    pairs.sort_by_key(|p| (p.case, p.ell, p.a));
    Ok(pairs)
}

/// Case-1 pairs in `[1, r_max] x [5, ell_max]` that carry theta-type (not
/// Ramanujan-type) congruences: the figure data. Case 2 is available behind
/// the same interface.
pub fn figure_pairs(
    cache: &TableCache,
    r_max: u64,
    ell_max: u64,
    case: u8,
) -> Result<Vec<FamilyPair>> {
    let pairs = family_enumerate(cache, ell_max)?;
    Ok(pairs
        .into_iter()
        .filter(|p| p.case == case && p.r <= r_max && p.alpha != 0)
        .collect())
}

// --- theorem-level verifiers --------------------------------------------

/// Verify an eta-family congruence: `f_{r,ell,0} = alpha * eta` (case 1) or
/// `alpha * eta^3` (case 2) termwise through `trunc`, with `alpha` the
/// leading partition value. Side conditions are checked, not assumed.
pub fn etafamily_verify(cache: &TableCache, r: u64, ell: u64, case: u8, trunc: i64) -> Result<u64> {
    let step = ell - 1;
    let (offset, kind) = match case {
        1 => (1u64, ThetaKind::Eta),
        2 => (3u64, ThetaKind::Eta3),
        _ => {
            return Err(Error::InvalidArgument(format!(
                "case must be 1 or 2, got {case}"
            )))
        }
    };
    if (r + offset) % step != 0 {
        return Err(Error::HypothesisFailed(format!(
            "r = {r} is not on a case-{case} line for ell = {ell}"
        )));
    }
    let a = (r + offset) / step;
    let applies = match case {
        1 => case1_applies(a, ell),
        _ => case2_applies(a, ell),
    };
    if !applies {
        return Err(Error::HypothesisFailed(format!(
            "side conditions fail for a = {a}, ell = {ell} (case {case})"
        )));
    }
    if r % ell == 0 {
        return Err(Error::ExcludedCase(format!("ell = {ell} divides r = {r}")));
    }
    let alpha = family_alpha(cache, r, ell, case)?;
    let f0 = build_f_cached(cache, r, ell, 0, trunc)?;
    let reference = shape_reference(kind, ell, trunc)?.scaled(alpha);
    f0.series.agrees_through(&reference, trunc)?;
    Ok(alpha)
}

/// Twice the weight drop `b(r, ell)`: the abnormal cases ask for `b = ell/2`.
pub fn b_value_times_2(r: u64, ell: u64) -> i64 {
    let r = r as i128;
    let ell = ell as i128;
    let num = 2 * ell * ell + r * (ell * ell - 1) - 2;
    let den = 2 * ell * (ell - 1);
    let fl = num.div_euclid(den);
    (2 * (ell - 1) * fl - r * ell) as i64
}

/// Input data for the abnormal verifier: the pair and its exact `2 b(r,ell)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AbnormalInput {
    pub r: u64,
    pub ell: u64,
    pub b_times_2: i64,
}

impl AbnormalInput {
    pub fn new(r: u64, ell: u64) -> Self {
        AbnormalInput {
            r,
            ell,
            b_times_2: b_value_times_2(r, ell),
        }
    }
}

/// What the abnormal verifier found: the matched shape and the diagnostics
/// of the hypotheses it checked.
#[derive(Debug, Clone)]
pub struct AbnormalOutcome {
    pub shape: ThetaShape,
    /// whether `f_{r,ell,0}` vanished through the working truncation
    pub f0_vanishes: bool,
}

/// Verify one of the three abnormal congruence shapes at `(r, ell)`:
///
/// 1. `f_{r,ell,0} = alpha eta^ell` (needs `2b = ell`, order `>= ell`,
///    `r = -1 mod 24`);
/// 2. `f_{r,ell,-1} = alpha eta^3` (needs `ell^2 = r + 4`, positive order,
///    `r = -3 mod 24`);
/// 3. `f_{r,ell,-1} = alpha ((12|ell) eta^{ell^2} - eta)` (needs
///    `ell^2 = r + 2`, `f_0` an eta^ell multiple, `r = -1 mod 24`).
///
/// The conclusion is compared termwise through `trunc` in every case.
pub fn abnormal_verify(
    cache: &TableCache,
    r: u64,
    ell: u64,
    case: u8,
    trunc: i64,
) -> Result<AbnormalOutcome> {
    if r % ell == 0 {
        return Err(Error::ExcludedCase(format!("ell = {ell} divides r = {r}")));
    }
    match case {
        1 => {
            let input = AbnormalInput::new(r, ell);
            if input.b_times_2 != ell as i64 {
                return Err(Error::HypothesisFailed(format!(
                    "b(r,ell) = {}/2, need {ell}/2",
                    input.b_times_2
                )));
            }
            if r % 24 != 23 {
                return Err(Error::HypothesisFailed(format!("r = {r} is not -1 mod 24")));
            }
            let f0 = build_f_cached(cache, r, ell, 0, trunc)?;
            if let Some(ord) = f0.series.ord() {
                if ord < ell as i64 {
                    return Err(Error::HypothesisFailed(format!(
                        "ord(f0) = {ord} < ell = {ell}"
                    )));
                }
            }
            let alpha = f0.series.coeff(ell as i64).unwrap_or(0);
            let reference = shape_reference(ThetaKind::EtaEll, ell, trunc)?.scaled(alpha);
            f0.series.agrees_through(&reference, trunc)?;
            Ok(AbnormalOutcome {
                shape: ThetaShape {
                    b: ell,
                    kind: ThetaKind::EtaEll,
                    scalar: alpha,
                },
                f0_vanishes: f0.series.is_zero(),
            })
        }
        2 => {
            if ell * ell != r + 4 {
                return Err(Error::HypothesisFailed(format!(
                    "ell^2 = {} but r + 4 = {}",
                    ell * ell,
                    r + 4
                )));
            }
            if r % 24 != 21 {
                return Err(Error::HypothesisFailed(format!("r = {r} is not -3 mod 24")));
            }
            let f0 = build_f_cached(cache, r, ell, 0, trunc)?;
            let fm1 = build_f_cached(cache, r, ell, -1, trunc)?;
            match fm1.series.ord() {
                Some(ord) if ord > 0 => {}
                Some(ord) => {
                    return Err(Error::HypothesisFailed(format!(
                        "ord(f_-1) = {ord} is not positive"
                    )))
                }
                None => {}
            }
            let alpha = fm1.series.coeff(3).unwrap_or(0);
            let reference = shape_reference(ThetaKind::Eta3, ell, trunc)?.scaled(alpha);
            fm1.series.agrees_through(&reference, trunc)?;
            Ok(AbnormalOutcome {
                shape: ThetaShape {
                    b: 3,
                    kind: ThetaKind::Eta3,
                    scalar: alpha,
                },
                f0_vanishes: f0.series.is_zero(),
            })
        }
        3 => {
            if ell * ell != r + 2 {
                return Err(Error::HypothesisFailed(format!(
                    "ell^2 = {} but r + 2 = {}",
                    ell * ell,
                    r + 2
                )));
            }
            if r % 24 != 23 {
                return Err(Error::HypothesisFailed(format!("r = {r} is not -1 mod 24")));
            }
            // f_0 must itself be a multiple of eta^ell
            let f0 = build_f_cached(cache, r, ell, 0, trunc)?;
            let beta = f0.series.coeff(ell as i64).unwrap_or(0);
            let f0_ref = shape_reference(ThetaKind::EtaEll, ell, trunc)?.scaled(beta);
            if f0.series.agrees_through(&f0_ref, trunc).is_err() {
                return Err(Error::HypothesisFailed(
                    "f_0 is not a multiple of eta^ell".into(),
                ));
            }
            let fm1 = build_f_cached(cache, r, ell, -1, trunc)?;
            match fm1.series.ord() {
                Some(ord) if ord <= 0 => {
                    return Err(Error::HypothesisFailed(format!(
                        "ord(f_-1) = {ord} is not positive"
                    )))
                }
                _ => {}
            }
            // normalized shape has -1 at grid index 1
            let lead = fm1.series.coeff(1).unwrap_or(0);
            let field = fm1.series.field();
            let alpha = field.neg(lead);
            let reference = shape_reference(ThetaKind::EtaEll2MinusEta, ell, trunc)?.scaled(alpha);
            fm1.series.agrees_through(&reference, trunc)?;
            Ok(AbnormalOutcome {
                shape: ThetaShape {
                    b: 1,
                    kind: ThetaKind::EtaEll2MinusEta,
                    scalar: alpha,
                },
                f0_vanishes: f0.series.is_zero(),
            })
        }
        _ => Err(Error::InvalidArgument(format!(
            "case must be 1..3, got {case}"
        ))),
    }
}

// --- grid orchestration ---------------------------------------------------

/// A full search job over a grid of parameters.
#[derive(Debug, Clone)]
pub struct SearchGrid {
    pub rs: Vec<u64>,
    pub ell_min: u64,
    pub ell_max: u64,
    pub m_min: u64,
    pub m_max: u64,
    pub deltas: Vec<i8>,
    pub params: SearchParams,
    /// truncation used to classify candidate generating functions
    pub detect_trunc: i64,
}

/// A `(r, ell, delta)` triple that survived the search for at least one `m`,
/// with the detected shape of its generating function.
#[derive(Debug, Clone)]
pub struct CandidateTriple {
    pub r: u64,
    pub ell: u64,
    pub delta: i8,
    pub shape: Option<ThetaShape>,
}

#[derive(Debug, Default)]
pub struct SearchOutcome {
    pub verdicts: Vec<SearchVerdict>,
    pub candidates: Vec<CandidateTriple>,
    pub budget_limited: bool,
}

/// Run the search over the whole grid, in parallel over `(r, ell, delta)`
/// tasks. Verdicts come back in deterministic `(r, ell, delta, m)` order.
pub fn run_search(cache: &Arc<TableCache>, grid: &SearchGrid) -> Result<SearchOutcome> {
    let mut tasks: Vec<(u64, u64, i8)> = Vec::new();
    for &r in &grid.rs {
        for ell in primes_in(grid.ell_min.max(5), grid.ell_max) {
            if r % ell == 0 {
                continue;
            }
            for &delta in &grid.deltas {
                tasks.push((r, ell, delta));
            }
        }
    }
    let results: Result<Vec<Vec<SearchVerdict>>> = tasks
        .par_iter()
        .map(|&(r, ell, delta)| {
            rule_out_search(cache, r, ell, delta, grid.m_min, grid.m_max, &grid.params)
        })
        .collect();
    let mut verdicts: Vec<SearchVerdict> = results?.into_iter().flatten().collect();
    verdicts.sort_by_key(|v| (v.r, v.ell, v.delta, v.m));

    let mut triples: Vec<(u64, u64, i8)> = verdicts
        .iter()
        .filter(|v| v.status == VerdictStatus::Candidate)
        .map(|v| (v.r, v.ell, v.delta))
        .collect();
    triples.dedup();
    let candidates: Result<Vec<CandidateTriple>> = triples
        .par_iter()
        .map(|&(r, ell, delta)| {
            let f = build_f_cached(cache, r, ell, delta, grid.detect_trunc)?;
            let shape = match theta_detect(&f.series) {
                Ok(s) => s,
                Err(Error::InsufficientData { .. }) => None,
                Err(e) => return Err(e),
            };
            Ok(CandidateTriple {
                r,
                ell,
                delta,
                shape,
            })
        })
        .collect();
    let mut candidates = candidates?;
    candidates.sort_by_key(|c| (c.r, c.ell, c.delta));
    let budget_limited = verdicts.iter().any(|v| v.budget_limited);
    Ok(SearchOutcome {
        verdicts,
        candidates,
        budget_limited,
    })
}

// --- export ---------------------------------------------------------------

/// Flat record mirrored by the CSV and JSON outputs.
#[derive(Debug, Clone, Serialize)]
pub struct VerdictRecord {
    pub r: u64,
    pub ell: u64,
    pub m: u64,
    pub delta: i8,
    pub status: String,
    pub t_plus: Option<u64>,
    pub t_minus: Option<u64>,
    pub notes: String,
}

pub const VERDICT_CSV_HEADER: &str = "r,ell,m,delta,status,t_plus,t_minus,notes";

impl SearchVerdict {
    pub fn to_record(&self, shape: Option<&ThetaShape>) -> VerdictRecord {
        let mut notes = String::new();
        if let Some(s) = self.surviving {
            notes.push_str(&format!("surviving={s:+}"));
        }
        if self.budget_limited {
            if !notes.is_empty() {
                notes.push(';');
            }
            notes.push_str("budget_limited");
        }
        if let Some(shape) = shape {
            if !notes.is_empty() {
                notes.push(';');
            }
            notes.push_str(&format!("theta={}", shape.kind.label()));
        }
        VerdictRecord {
            r: self.r,
            ell: self.ell,
            m: self.m,
            delta: self.delta,
            status: self.status.label().to_string(),
            t_plus: self.t_plus,
            t_minus: self.t_minus,
            notes,
        }
    }
}

impl VerdictRecord {
    pub fn csv_line(&self) -> String {
        fn opt(v: &Option<u64>) -> String {
            v.map(|x| x.to_string()).unwrap_or_default()
        }
        format!(
            "{},{},{},{},{},{},{},{}",
            self.r,
            self.ell,
            self.m,
            self.delta,
            self.status,
            opt(&self.t_plus),
            opt(&self.t_minus),
            self.notes
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cache() -> TableCache {
        TableCache::new()
    }

    #[test]
    fn ramanujan_check_examples() {
        let c = cache();
        assert!(ramanujan_check(&c, 1, 5, 400).unwrap());
        assert!(ramanujan_check(&c, 1, 7, 400).unwrap());
        assert!(ramanujan_check(&c, 1, 11, 200).unwrap());
        assert!(!ramanujan_check(&c, 17, 7, 400).unwrap());
        assert!(!ramanujan_check(&c, 1, 13, 400).unwrap());
        assert!(ramanujan_check(&c, 7, 11, 200).unwrap());
    }

    #[test]
    fn search_trivial_short_circuit() {
        let c = cache();
        let vs = rule_out_search(&c, 1, 5, 0, 5, 30, &SearchParams::default()).unwrap();
        assert!(!vs.is_empty());
        assert!(vs
            .iter()
            .all(|v| v.status == VerdictStatus::TrivialRamanujan));
    }

    #[test]
    fn triviality_is_judged_per_class() {
        let c = cache();
        // f_{21,5,0} = 0 but f_{21,5,-1} = eta^3: the -1 class carries a
        // nontrivial congruence family and must stay a candidate
        let vs0 = rule_out_search(&c, 21, 5, 0, 5, 30, &SearchParams::default()).unwrap();
        assert!(vs0
            .iter()
            .all(|v| v.status == VerdictStatus::TrivialRamanujan));
        let vs1 = rule_out_search(&c, 21, 5, -1, 5, 30, &SearchParams::default()).unwrap();
        assert!(vs1.iter().all(|v| v.status == VerdictStatus::Candidate));
        assert!(vs1.iter().all(|v| !v.budget_limited));

        // f_{9,5,-1} = 0: the whole -1 class vanishes, so every theta-type
        // congruence in it is Ramanujan-implied
        assert!(delta_progression_vanishes(&c, 9, 5, -1, 500).unwrap());
        assert!(!delta_progression_vanishes(&c, 9, 5, 0, 500).unwrap());
        let vs2 = rule_out_search(&c, 9, 5, -1, 5, 30, &SearchParams::default()).unwrap();
        assert!(vs2
            .iter()
            .all(|v| v.status == VerdictStatus::TrivialRamanujan));
    }

    #[test]
    fn search_rules_out_generic_cell() {
        let c = cache();
        let vs = rule_out_search(&c, 5, 7, 0, 5, 60, &SearchParams::default()).unwrap();
        assert!(vs.iter().all(|v| v.status == VerdictStatus::RuledOut));
        for v in &vs {
            let tp = v.t_plus.unwrap();
            let tm = v.t_minus.unwrap();
            assert_eq!(witness_class(5, tp, v.m), 1, "witness class m={}", v.m);
            assert_eq!(witness_class(5, tm, v.m), -1, "witness class m={}", v.m);
            // witnesses really have p_r(t) != 0 and the right class mod ell
            let table = c.get_mod(5, 7, tp.max(tm)).unwrap();
            for t in [tp, tm] {
                assert_ne!(table.value_mod(t), 0);
                assert_eq!(kronecker(5 * (5 - 24 * t as i64), 7), 0);
            }
        }
    }

    #[test]
    fn witness_class_degenerate_when_m_divides_r() {
        // the symbol r(r-24t) vanishes identically mod m = r
        for t in 1..40u64 {
            assert_eq!(kronecker(5 * (5 - 24 * t as i64), 5), 0);
        }
        // the intrinsic class still separates witnesses
        let signs: Vec<i32> = (1..40u64).map(|t| witness_class(5, t, 5)).collect();
        assert!(signs.contains(&1));
        assert!(signs.contains(&-1));
    }

    #[test]
    fn search_keeps_known_congruence_as_candidate() {
        let c = cache();
        let vs = rule_out_search(&c, 17, 7, 0, 5, 60, &SearchParams::default()).unwrap();
        assert!(
            vs.iter().all(|v| v.status == VerdictStatus::Candidate),
            "every m must stay a candidate for (17,7,0)"
        );
        assert!(vs.iter().all(|v| !v.budget_limited));
    }

    #[test]
    fn reduce_modulus_examples() {
        // r=1, t=4: r - 24t = -95 = -5*19, so m'' = 1 for m = 7*23
        assert_eq!(reduce_modulus(1, 4, 161, 5).unwrap(), (161, 1));
        // every prime of m divides r(r-24t): m'' = m
        // r=1, t=4: pick m = 19 (19 | 95)
        assert_eq!(reduce_modulus(1, 4, 19, 7).unwrap(), (1, 19));
        assert!(reduce_modulus(1, 4, 50, 7).is_err()); // not squarefree
        assert!(reduce_modulus(1, 4, 35, 5).is_err()); // gcd with 6*ell
    }

    #[test]
    fn brute_verify_examples() {
        let c = cache();
        assert!(brute_verify(&c, 1, 5, 1, 4, 2000).unwrap());
        assert!(brute_verify(&c, 1, 7, 1, 5, 1000).unwrap());
        assert!(brute_verify(&c, 1, 11, 1, 6, 500).unwrap());
        // no Ramanujan congruence at ell = 13
        for t in 0..13u64 {
            assert!(!brute_verify(&c, 1, 13, 1, t, 500).unwrap(), "t={t}");
        }
    }

    #[test]
    fn theorem_guided_brute_congruence() {
        // (17, 7): congruence for t = 1 mod 7 with (24t-17 | m) = -(7 | m)
        let c = cache();
        let mut verified = 0;
        for m in [5u64, 11, 13, 17, 19] {
            for t in 1..200u64 {
                if t % 7 != 1 {
                    continue;
                }
                if kronecker(24 * t as i64 - 17, m as i64) != -kronecker(7, m as i64) {
                    continue;
                }
                assert!(brute_verify(&c, 17, 7, m, t, 200).unwrap(), "m={m} t={t}");
                verified += 1;
                break;
            }
        }
        assert!(verified >= 4);
    }

    #[test]
    fn square_class_closure() {
        // congruences propagate along squares: r - 24t' = (r - 24t) h^2 mod ell*m
        let c = cache();
        let (r, ell, m) = (17u64, 7u64, 5u64);
        let lm = ell * m;
        // find one congruence t
        let mut t0 = None;
        for t in 1..lm {
            if t % 7 == 1 && kronecker(24 * t as i64 - 17, m as i64) == -kronecker(7, m as i64) {
                t0 = Some(t);
                break;
            }
        }
        let t0 = t0.unwrap();
        assert!(brute_verify(&c, r, ell, m, t0, 300).unwrap());
        for h in [2u64, 3, 4, 6] {
            if gcd(h, lm) != 1 {
                continue;
            }
            let target = (r as i64 - 24 * t0 as i64) * (h * h) as i64;
            for tp in 0..lm {
                if (r as i64 - 24 * tp as i64 - target).rem_euclid(lm as i64) == 0 {
                    assert!(
                        brute_verify(&c, r, ell, m, tp, 300).unwrap(),
                        "h={h} t'={tp}"
                    );
                }
            }
        }
    }

    #[test]
    fn congruence_moduli_are_restricted() {
        // scan small moduli M and 0 <= t < M for progressions p_1(Mn+t) = 0
        // mod 5: every hit must have 5 | M and (r(r-24t) | 5) != 1
        let c = cache();
        let table = c.get_mod(1, 5, 13_000).unwrap();
        for modulus in 2..=40u64 {
            for t in 0..modulus {
                let vanishes = (0..=300).all(|n| table.value_mod(modulus * n + t) == 0);
                if vanishes {
                    assert_eq!(modulus % 5, 0, "M={modulus} t={t}");
                    assert_ne!(kronecker((1 - 24 * t as i64).rem_euclid(5), 5), 1);
                }
            }
        }
    }

    #[test]
    fn family_rows_match_handwritten_table() {
        // the table's eleven lines with their conditions, spot-checked
        let rows = family_rows(50);
        // ell = 7: lines a = 3 (mod 6), 7 (mod 3), 11, 15 (mod 3), 13? no (mod 12)
        let ell7: Vec<u64> = rows.iter().filter(|r| r.ell == 7).map(|r| r.a).collect();
        assert_eq!(ell7, vec![3, 7, 11, 15]);
        // ell = 5: a = 5 (mod 4), 11 (always)
        let ell5: Vec<u64> = rows.iter().filter(|r| r.ell == 5).map(|r| r.a).collect();
        assert_eq!(ell5, vec![5, 11]);
        // ell = 13: 1 mod 12, every line with a <= 2*13+1 = 27 applies
        let ell13: Vec<u64> = rows.iter().filter(|r| r.ell == 13).map(|r| r.a).collect();
        assert_eq!(ell13, vec![3, 5, 7, 9, 11, 13, 15, 17, 19, 21, 23]);
        // r-values on the row
        let row = rows.iter().find(|r| r.ell == 7 && r.a == 3).unwrap();
        assert_eq!(row.r1, 17);
        assert_eq!(row.r2, Some(3));
    }

    #[test]
    fn family_alpha_known_values() {
        let c = cache();
        assert_eq!(family_alpha(&c, 17, 7, 1).unwrap(), 3);
        assert_eq!(family_alpha(&c, 19, 5, 1).unwrap(), 4);
        assert_eq!(family_alpha(&c, 3, 7, 2).unwrap(), 3);
    }

    #[test]
    fn etafamily_verify_examples() {
        let c = cache();
        assert_eq!(etafamily_verify(&c, 17, 7, 1, 800).unwrap(), 3);
        assert_eq!(etafamily_verify(&c, 19, 5, 1, 800).unwrap(), 4);
        assert_eq!(etafamily_verify(&c, 3, 7, 2, 800).unwrap(), 3);
        // (5, 7) is on no line: a = (5+1)/6 = 1 < 3
        assert!(etafamily_verify(&c, 5, 7, 1, 200).is_err());
    }

    #[test]
    fn b_value_examples() {
        assert_eq!(b_value_times_2(23, 5), 5);
        assert_eq!(b_value_times_2(23, 7), 7);
        assert_eq!(b_value_times_2(119, 11), 11);
        assert_eq!(b_value_times_2(21, 5), -1);
        assert_ne!(b_value_times_2(17, 7), 7);
    }

    #[test]
    fn abnormal_verify_examples() {
        let c = cache();
        let out = abnormal_verify(&c, 23, 7, 1, 600).unwrap();
        assert_eq!(out.shape.kind, ThetaKind::EtaEll);
        assert_eq!(out.shape.scalar, 3);

        let out = abnormal_verify(&c, 21, 5, 2, 600).unwrap();
        assert_eq!(out.shape.kind, ThetaKind::Eta3);
        assert_eq!(out.shape.scalar, 1);
        assert!(out.f0_vanishes);

        // f_{23,5,-1} = 3 (eta^25 + eta): scalar -2 = 3 in the signed shape
        let out = abnormal_verify(&c, 23, 5, 3, 600).unwrap();
        assert_eq!(out.shape.kind, ThetaKind::EtaEll2MinusEta);
        assert_eq!(out.shape.scalar, 2);

        // (17, 7) satisfies no abnormal hypothesis
        assert!(abnormal_verify(&c, 17, 7, 1, 200).is_err());
    }

    #[test]
    fn ruled_out_cells_have_no_congruence_at_any_t() {
        // whenever the search rules (r, ell, m, delta) out, brute force finds
        // a violation for every t in the class below ell * m
        let c = cache();
        let r = 5u64;
        let n_max = 150u64;
        for ell in [7u64, 11] {
            for delta in [0i8, -1] {
                let verdicts =
                    rule_out_search(&c, r, ell, delta, 5, 23, &SearchParams::default()).unwrap();
                for v in verdicts {
                    for t in 0..ell * v.m {
                        let class = kronecker(r as i64 * (r as i64 - 24 * t as i64), ell as i64);
                        if class != delta as i32 {
                            continue;
                        }
                        let holds = brute_verify(&c, r, ell, v.m, t, n_max).unwrap();
                        match v.status {
                            // ruled out: no t in the class may carry a congruence
                            VerdictStatus::RuledOut => assert!(
                                !holds,
                                "ruled-out cell (r,ell,m,delta,t)=({r},{ell},{},{delta},{t}) \
                                 still shows a congruence",
                                v.m
                            ),
                            // vanishing class: every t in it trivially does
                            VerdictStatus::TrivialRamanujan => assert!(
                                holds,
                                "trivial cell (r,ell,m,delta,t)=({r},{ell},{},{delta},{t}) \
                                 has a nonvanishing progression",
                                v.m
                            ),
                            VerdictStatus::Candidate => {
                                panic!("unexpected candidate at (5,{ell},{delta})")
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn single_color_search_is_clean() {
        // r = 1 produces no nontrivial candidates: the three classical pairs
        // short-circuit as trivial and everything else is ruled out
        let c = Arc::new(cache());
        let grid = SearchGrid {
            rs: vec![1],
            ell_min: 5,
            ell_max: 100,
            m_min: 5,
            m_max: 100,
            deltas: vec![0, -1],
            params: SearchParams::default(),
            detect_trunc: 500,
        };
        let outcome = run_search(&c, &grid).unwrap();
        assert!(outcome.candidates.is_empty());
        assert!(!outcome.budget_limited);
        let trivial_pairs: std::collections::BTreeSet<(u64, u64, i8)> = outcome
            .verdicts
            .iter()
            .filter(|v| v.status == VerdictStatus::TrivialRamanujan)
            .map(|v| (v.r, v.ell, v.delta))
            .collect();
        for ell in [5u64, 7, 11] {
            assert!(trivial_pairs.contains(&(1, ell, 0)), "ell={ell}");
        }
        assert!(!trivial_pairs.contains(&(1, 13, 0)));
    }

    #[test]
    fn verdict_csv_shape() {
        let v = SearchVerdict {
            r: 17,
            ell: 7,
            m: 11,
            delta: 0,
            status: VerdictStatus::Candidate,
            t_plus: Some(8),
            t_minus: None,
            surviving: Some(-1),
            budget_limited: false,
        };
        let rec = v.to_record(None);
        assert_eq!(rec.csv_line(), "17,7,11,0,candidate,8,,surviving=-1");
    }
}
