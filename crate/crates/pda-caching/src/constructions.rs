//! Two classic array families.
//!
//! [`construct_mn`] builds the t-subset array: rows are the t-element subsets
//! of the caches, a cache stars the subsets containing it, and each
//! (t+1)-subset names one symbol. It has the best known load under uniform
//! sharing but its row count C(K, t) explodes quickly.
//!
//! [`construct_b`] builds a q-ary family with K = q(m+1) caches and only
//! (q-1)q^m rows. Rows are tuples (a, b) with a in [0, q-1) and b a length-m
//! q-ary word; columns come in m+1 groups of q, labeled (u, v). Written in
//! digits t (b reversed), column (u, v) with u < m marks the rows with
//! t_u = v and points them at the word with t_u rewritten to v + a + 1 mod q,
//! while the last group (m, v) marks rows whose digit sum is v - 1 - a mod q
//! and points them at t itself. Every symbol appears once per column group,
//! so the array is (q-1)(m+1)-regular.
//!
//! Both constructions refuse to build grids larger than a cell budget
//! (default [`DEFAULT_CELL_BUDGET`]).

use std::collections::BTreeMap;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::pda::{Cell, Pda};

/// Cap on F x K cells a construction will materialize by default.
pub const DEFAULT_CELL_BUDGET: usize = 10_000_000;

/// C(n, k) without overflow, or None when it exceeds u128.
pub(crate) fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 1..=k {
        c = c.checked_mul((n - k + i) as u128)? / i as u128;
    }
    Some(c)
}

// ---- t-subset construction -----------------------------------------------

/// (F, Z, S) of the t-subset array, when they fit in usize.
pub fn mn_params(num_caches: usize, t: usize) -> Option<(usize, usize, usize)> {
    if t == 0 || t >= num_caches {
        return None;
    }
    let f = usize::try_from(binomial(num_caches as u64, t as u64)?).ok()?;
    let z = usize::try_from(binomial(num_caches as u64 - 1, t as u64 - 1)?).ok()?;
    let s = usize::try_from(binomial(num_caches as u64, t as u64 + 1)?).ok()?;
    Some((f, z, s))
}

pub fn construct_mn(num_caches: usize, t: usize) -> Result<Pda> {
    construct_mn_bounded(num_caches, t, DEFAULT_CELL_BUDGET)
}

/// The t-subset array: F = C(K, t), Z = C(K-1, t-1), S = C(K, t+1).
///
/// Rows are t-subsets in lexicographic order; cell (T, k) is a star when
/// k is in T and otherwise the lexicographic rank of T + {k} among the
/// (t+1)-subsets. Row labels list the subset in 1-based form.
pub fn construct_mn_bounded(num_caches: usize, t: usize, cell_budget: usize) -> Result<Pda> {
    if t == 0 || t >= num_caches {
        return Err(Error::Argument(format!(
            "cached fraction t={t} must satisfy 1 <= t < {num_caches}"
        )));
    }
    let f = binomial(num_caches as u64, t as u64)
        .ok_or_else(|| Error::Budget("row count overflows".into()))?;
    if f.checked_mul(num_caches as u128).map_or(true, |c| c > cell_budget as u128) {
        return Err(Error::Budget(format!(
            "{f} x {num_caches} cells exceed the budget of {cell_budget}"
        )));
    }

    let rank: BTreeMap<Vec<usize>, usize> = (0..num_caches)
        .combinations(t + 1)
        .enumerate()
        .map(|(i, set)| (set, i))
        .collect();
    let mut grid = Vec::with_capacity(f as usize);
    let mut row_labels = Vec::with_capacity(f as usize);
    for subset in (0..num_caches).combinations(t) {
        let row = (0..num_caches)
            .map(|k| {
                if subset.contains(&k) {
                    Cell::Star
                } else {
                    let mut joined = subset.clone();
                    joined.push(k);
                    joined.sort_unstable();
                    Cell::Symbol(rank[&joined])
                }
            })
            .collect();
        grid.push(row);
        let label = subset.iter().map(|e| (e + 1).to_string()).join(",");
        row_labels.push(format!("{{{label}}}"));
    }
    Pda::from_grid_with_labels(grid, Some(row_labels), None).map_err(Error::Invalid)
}

// ---- q-ary construction ----------------------------------------------------

/// (K, F, Z, S) of the q-ary family, when they fit in usize.
pub fn const_b_params(q: usize, m: usize) -> Option<(usize, usize, usize, usize)> {
    if q < 2 || m < 1 {
        return None;
    }
    let qm = q.checked_pow(u32::try_from(m).ok()?)?;
    let f = (q - 1).checked_mul(qm)?;
    let z = (q - 1).checked_mul(q - 1)?.checked_mul(qm / q)?;
    let k = q.checked_mul(m + 1)?;
    Some((k, f, z, qm))
}

pub fn construct_b(q: usize, m: usize) -> Result<Pda> {
    construct_b_bounded(q, m, DEFAULT_CELL_BUDGET)
}

/// The q-ary array with K = q(m+1), F = (q-1)q^m, Z = (q-1)^2 q^(m-1),
/// S = q^m. Rows are labeled "(a,b_1,...,b_m)" and columns "(u,v)".
pub fn construct_b_bounded(q: usize, m: usize, cell_budget: usize) -> Result<Pda> {
    let (k, f, _, s) = const_b_params(q, m)
        .ok_or_else(|| Error::Argument(format!("bad family parameters q={q}, m={m}")))?;
    if f.checked_mul(k).map_or(true, |c| c > cell_budget) {
        return Err(Error::Budget(format!(
            "{f} x {k} cells exceed the budget of {cell_budget}"
        )));
    }

    // Digit weights: symbol id = sum t_i q^i.
    let weight: Vec<usize> = (0..m).map(|i| q.pow(i as u32)).collect();
    let mut grid = Vec::with_capacity(f);
    let mut row_labels = Vec::with_capacity(f);
    for a in 0..q - 1 {
        for word in 0..s {
            // b in lexicographic order, leftmost digit most significant;
            // the digit string t reads b back to front.
            let b: Vec<usize> = (0..m)
                .map(|pos| word / q.pow((m - 1 - pos) as u32) % q)
                .collect();
            let t: Vec<usize> = b.iter().rev().copied().collect();
            let digit_sum: usize = t.iter().sum();
            let mut row = Vec::with_capacity(k);
            for u in 0..=m {
                for v in 0..q {
                    let cell = if u < m {
                        if t[u] != v {
                            Cell::Star
                        } else {
                            let rewritten = (v + a + 1) % q;
                            let id = word_id(&t, &weight) + rewritten * weight[u] - v * weight[u];
                            Cell::Symbol(id)
                        }
                    } else if digit_sum % q != (v + 2 * q - 1 - a) % q {
                        Cell::Star
                    } else {
                        Cell::Symbol(word_id(&t, &weight))
                    };
                    row.push(cell);
                }
            }
            grid.push(row);
            let label = std::iter::once(a).chain(b.iter().copied()).join(",");
            row_labels.push(format!("({label})"));
        }
    }
    let col_labels = (0..=m)
        .flat_map(|u| (0..q).map(move |v| format!("({u},{v})")))
        .collect();
    Pda::from_grid_with_labels(grid, Some(row_labels), Some(col_labels)).map_err(Error::Invalid)
}

fn word_id(t: &[usize], weight: &[usize]) -> usize {
    t.iter().zip(weight).map(|(d, w)| d * w).sum()
}

/// Parse a "(u,v)" column label.
pub(crate) fn parse_uv_label(text: &str) -> Option<(usize, usize)> {
    let inner = text.trim().strip_prefix('(')?.strip_suffix(')')?;
    let (u, v) = inner.split_once(',')?;
    Some((u.trim().parse().ok()?, v.trim().parse().ok()?))
}

/// Recognize an array produced by [`construct_b`] from its column labels and
/// parameters. Returns the family parameters (q, m) when everything lines up.
pub fn detect_const_b(pda: &Pda) -> Option<(usize, usize)> {
    let labels = pda.col_labels()?;
    let parsed: Vec<(usize, usize)> = labels
        .iter()
        .map(|l| parse_uv_label(l))
        .collect::<Option<_>>()?;
    let m = parsed.iter().map(|&(u, _)| u).max()?;
    let q = parsed.iter().map(|&(_, v)| v).max()? + 1;
    let mut seen = vec![false; q * (m + 1)];
    for &(u, v) in &parsed {
        let idx = u * q + v;
        if seen[idx] {
            return None;
        }
        seen[idx] = true;
    }
    if !seen.iter().all(|&s| s) {
        return None;
    }
    let (k, f, z, s) = const_b_params(q, m)?;
    ((pda.cols(), pda.rows(), pda.stars_per_column(), pda.symbol_count()) == (k, f, z, s))
        .then_some((q, m))
}
