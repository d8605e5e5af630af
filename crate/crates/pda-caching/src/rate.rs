//! Exact delivery loads.
//!
//! Every load here is a rational number of subfile transmissions per file:
//! the numerator counts weighted server messages and the denominator is the
//! subpacketization F. Values are kept exact; decimal rendering happens only
//! at presentation time.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use crate::constructions::binomial;
use crate::error::{Error, Result};
use crate::gpda::{GCell, GeneralizedPda};
use crate::ordering::Profile;
use crate::pda::Pda;

/// An exact non-negative rational load.
///
/// Stored as written (typically numerator over the subpacketization F, not
/// reduced); equality and ordering compare values, so 24/3 == 8/1.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LoadValue {
    pub numerator: u64,
    pub denominator: u64,
}

impl LoadValue {
    pub fn new(numerator: u64, denominator: u64) -> LoadValue {
        assert!(denominator > 0, "load denominator must be positive");
        LoadValue { numerator, denominator }
    }

    /// Lowest-terms form.
    pub fn reduced(&self) -> (u64, u64) {
        let g = gcd(self.numerator, self.denominator);
        (self.numerator / g, self.denominator / g)
    }

    pub fn as_f64(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }

    /// Fixed-point decimal string with banker's rounding on exact halves.
    pub fn decimal(&self, places: u32) -> String {
        let scale = 10u128.pow(places);
        let num = self.numerator as u128 * scale;
        let den = self.denominator as u128;
        let mut q = num / den;
        let r = num % den;
        match (2 * r).cmp(&den) {
            Ordering::Greater => q += 1,
            Ordering::Equal => q += q & 1,
            Ordering::Less => {}
        }
        if places == 0 {
            return q.to_string();
        }
        format!("{}.{:0width$}", q / scale, q % scale, width = places as usize)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

impl PartialEq for LoadValue {
    fn eq(&self, other: &Self) -> bool {
        self.numerator as u128 * other.denominator as u128
            == other.numerator as u128 * self.denominator as u128
    }
}

impl Eq for LoadValue {}

impl PartialOrd for LoadValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LoadValue {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.numerator as u128 * other.denominator as u128)
            .cmp(&(other.numerator as u128 * self.denominator as u128))
    }
}

impl fmt::Display for LoadValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

// ---- first-occurrence positions -------------------------------------------

/// For each symbol, the 1-based position of the first column containing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TauMap {
    positions: Vec<usize>,
}

impl TauMap {
    /// 1-based first-occurrence position of symbol `s` (0-based id).
    pub fn position(&self, s: usize) -> usize {
        self.positions[s]
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }
}

/// First-occurrence positions of every symbol, reading columns left to right.
pub fn tau_values(pda: &Pda) -> TauMap {
    let mut positions = vec![0usize; pda.symbol_count()];
    for k in (0..pda.cols()).rev() {
        for s in pda.column_symbols(k) {
            positions[s] = k + 1;
        }
    }
    TauMap { positions }
}

// ---- loads -----------------------------------------------------------------

/// Delivery load of an array read in its given column order:
/// sum over symbols of the profile load at the symbol's first-occurrence
/// position, divided by the row count.
pub fn load_from_pda(pda: &Pda, profile: &Profile) -> Result<LoadValue> {
    if profile.len() != pda.cols() {
        return Err(Error::Dimension(format!(
            "profile has {} caches, array has {} columns",
            profile.len(),
            pda.cols()
        )));
    }
    let tau = tau_values(pda);
    let numerator: u64 = tau
        .positions()
        .iter()
        .map(|&pos| profile.loads()[pos - 1] as u64)
        .sum();
    Ok(LoadValue::new(numerator, pda.rows() as u64))
}

/// Delivery load of a user-level array: one message per distinct (symbol,
/// replica) tag, i.e. sum over symbols of the largest replica index,
/// divided by the row count.
pub fn load_from_gpda(gpda: &GeneralizedPda) -> LoadValue {
    let mut max_replica = vec![0u64; gpda.symbol_count()];
    for row in gpda.grid_rows() {
        for cell in row {
            if let GCell::Pair(s, i) = cell {
                max_replica[s] = max_replica[s].max(i as u64);
            }
        }
    }
    LoadValue::new(max_replica.iter().sum(), gpda.rows() as u64)
}

/// Closed-form load of the family ordering from
/// [`crate::ordering::const_b_order`] for parameters (q, m) and a sorted
/// profile: sum_{i=1..m} L_i / q^i + L_{m+2} / ((q-1) q^m).
pub fn load_const_b_ordered(q: usize, m: usize, profile: &Profile) -> Result<LoadValue> {
    check_const_b(q, m, profile)?;
    let loads = profile.loads();
    let f = (q as u64 - 1) * (q as u64).pow(m as u32);
    // Over the common denominator F: L_i gains a factor (q-1) q^(m-i).
    let mut numerator = 0u64;
    for i in 1..=m {
        numerator += loads[i - 1] as u64 * (q as u64 - 1) * (q as u64).pow((m - i) as u32);
    }
    numerator += loads[m + 1] as u64;
    Ok(LoadValue::new(numerator, f))
}

/// Closed-form load of the same family read in construction order:
/// L_1 / q + L_2 / (q (q-1)).
pub fn load_const_b_unordered(q: usize, m: usize, profile: &Profile) -> Result<LoadValue> {
    check_const_b(q, m, profile)?;
    let loads = profile.loads();
    let f = (q as u64 - 1) * (q as u64).pow(m as u32);
    let numerator = loads[0] as u64 * (q as u64 - 1) * (q as u64).pow(m as u32 - 1)
        + loads[1] as u64 * (q as u64).pow(m as u32 - 1);
    Ok(LoadValue::new(numerator, f))
}

fn check_const_b(q: usize, m: usize, profile: &Profile) -> Result<()> {
    if q < 2 || m < 1 {
        return Err(Error::Argument(format!("bad family parameters q={q}, m={m}")));
    }
    if profile.len() != q * (m + 1) {
        return Err(Error::Dimension(format!(
            "profile has {} caches, the (q={q}, m={m}) family has {}",
            profile.len(),
            q * (m + 1)
        )));
    }
    if (q as u64).checked_pow(m as u32).is_none() {
        return Err(Error::Budget(format!("q^m overflows for q={q}, m={m}")));
    }
    Ok(())
}

/// Closed-form load of the t-subset array from
/// [`crate::constructions::construct_mn`], which is ordering-invariant:
/// sum_{j=1..K-t} L_j C(K-j, t) / C(K, t).
pub fn load_mn_baseline(num_caches: usize, t: usize, profile: &Profile) -> Result<LoadValue> {
    if t == 0 || t >= num_caches {
        return Err(Error::Argument(format!(
            "cached fraction t={t} must satisfy 1 <= t < {num_caches}"
        )));
    }
    if profile.len() != num_caches {
        return Err(Error::Dimension(format!(
            "profile has {} caches, expected {num_caches}",
            profile.len()
        )));
    }
    let too_big = || Error::Budget(format!("binomial overflow for K={num_caches}, t={t}"));
    let f = binomial(num_caches as u64, t as u64).ok_or_else(too_big)?;
    let mut numerator: u128 = 0;
    for j in 1..=num_caches - t {
        let ways = binomial((num_caches - j) as u64, t as u64).ok_or_else(too_big)?;
        numerator = numerator
            .checked_add(profile.loads()[j - 1] as u128 * ways)
            .ok_or_else(too_big)?;
    }
    let numerator = u64::try_from(numerator).map_err(|_| too_big())?;
    let f = u64::try_from(f).map_err(|_| too_big())?;
    Ok(LoadValue::new(numerator, f))
}
