//! Column orderings and association profiles.
//!
//! When caches serve different numbers of users, the delivery load depends on
//! which PDA column each cache gets. The load of an ordering is
//! sum_s L_{tau_s} / F, where tau_s is the first position whose column
//! contains symbol s and L is the non-increasing association profile, so good
//! orderings push first occurrences of symbols toward lightly loaded caches.
//!
//! Three engines are provided: a greedy search that grows a prefix maximizing
//! symbol overlap, an exhaustive search over column permutations (with
//! provably load-equal permutations pruned), and a closed-form ordering for
//! the q-ary family of [`crate::constructions::construct_b`].

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::constructions;
use crate::error::{Error, Result};
use crate::pda::Pda;
use crate::rate::LoadValue;

/// Default cap on permutations the exhaustive search will enumerate.
pub const DEFAULT_PERM_BUDGET: u64 = 1_000_000;

// ---- association profiles ----------------------------------------------

/// Users per cache, kept sorted in non-increasing order. `relabeling[p]`
/// names the original cache that was moved to sorted position p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profile {
    loads: Vec<usize>,
    relabeling: Vec<usize>,
    input_was_sorted: bool,
}

impl Profile {
    /// Sort a raw occupancy vector. The sort is stable, so ties keep their
    /// original cache order. Zero entries are allowed; an empty or all-zero
    /// vector is not.
    pub fn normalize(raw: &[usize]) -> Result<Profile> {
        if raw.is_empty() {
            return Err(Error::Argument("profile is empty".into()));
        }
        if raw.iter().all(|&l| l == 0) {
            return Err(Error::Argument("profile has no users".into()));
        }
        let mut relabeling: Vec<usize> = (0..raw.len()).collect();
        relabeling.sort_by_key(|&i| std::cmp::Reverse(raw[i]));
        let loads: Vec<usize> = relabeling.iter().map(|&i| raw[i]).collect();
        let input_was_sorted = relabeling.windows(2).all(|w| w[0] < w[1]);
        Ok(Profile { loads, relabeling, input_was_sorted })
    }

    /// The all-ones profile: one dedicated user per cache.
    pub fn ones(count: usize) -> Result<Profile> {
        Profile::normalize(&vec![1; count])
    }

    pub fn loads(&self) -> &[usize] {
        &self.loads
    }

    pub fn relabeling(&self) -> &[usize] {
        &self.relabeling
    }

    pub fn input_was_sorted(&self) -> bool {
        self.input_was_sorted
    }

    pub fn len(&self) -> usize {
        self.loads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.loads.is_empty()
    }

    /// Total number of users.
    pub fn num_users(&self) -> usize {
        self.loads.iter().sum()
    }
}

impl FromStr for Profile {
    type Err = Error;

    /// Parse a comma-separated occupancy list such as "5,4,3,2,2,1".
    fn from_str(s: &str) -> Result<Profile> {
        let raw: Vec<usize> = s
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad profile entry {tok:?}")))
            })
            .collect::<Result<_>>()?;
        Profile::normalize(&raw)
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.loads.iter().map(|l| l.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

// ---- orderings and traces ------------------------------------------------

/// A column ordering: `perm[p]` is the source column placed at position p,
/// together with the reordered array itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnOrdering {
    pub perm: Vec<usize>,
    pub reordered: Pda,
}

impl ColumnOrdering {
    pub fn identity(pda: &Pda) -> ColumnOrdering {
        ColumnOrdering { perm: (0..pda.cols()).collect(), reordered: pda.clone() }
    }

    pub fn new(pda: &Pda, perm: Vec<usize>) -> Result<ColumnOrdering> {
        let reordered = pda.permute_columns(&perm)?;
        Ok(ColumnOrdering { perm, reordered })
    }
}

/// A tie among next-column candidates at one position of the greedy search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnTie {
    /// 1-based position in the ordering that was being filled.
    pub position: usize,
    /// Tied source columns, ascending.
    pub candidates: Vec<usize>,
}

/// How the symbol set grows along an ordering.
///
/// `prefix_symbol_sets[p]` holds the symbols seen in the first p+1 columns;
/// the sets are nested and the last one has all S symbols. `alpha` is the
/// first (1-based) prefix length covering every symbol.
/// `intersection_numbers[p]` counts how many of column p's symbols were
/// already present, so the growth identity
/// |I_p| - |I_{p-1}| = (F - Z) - intersection_numbers[p] holds for p >= 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderingTrace {
    pub prefix_symbol_sets: Vec<BTreeSet<usize>>,
    pub alpha: usize,
    pub intersection_numbers: Vec<usize>,
    /// Opening pairs that tied on intersection size (when more than one).
    pub pair_ties: Vec<(usize, usize)>,
    /// Later steps where several columns tied.
    pub column_ties: Vec<ColumnTie>,
}

impl OrderingTrace {
    /// Trace of an array read in its given column order.
    pub fn of(pda: &Pda) -> OrderingTrace {
        let mut prefix_symbol_sets = Vec::with_capacity(pda.cols());
        let mut intersection_numbers = Vec::with_capacity(pda.cols());
        let mut current: BTreeSet<usize> = BTreeSet::new();
        let mut alpha = 0;
        for k in 0..pda.cols() {
            let symbols = pda.column_symbols(k);
            let overlap = symbols.intersection(&current).count();
            intersection_numbers.push(if k == 0 { 0 } else { overlap });
            current.extend(symbols);
            prefix_symbol_sets.push(current.clone());
            if alpha == 0 && current.len() == pda.symbol_count() {
                alpha = k + 1;
            }
        }
        OrderingTrace {
            prefix_symbol_sets,
            alpha,
            intersection_numbers,
            pair_ties: Vec::new(),
            column_ties: Vec::new(),
        }
    }
}

/// Return the trace's alpha value, sanity-checking the pigeonhole bound for
/// regular arrays: in a g-regular array every symbol occupies g distinct
/// columns, so alpha <= K - g + 1 under any ordering.
pub fn alpha_star(trace: &OrderingTrace, pda: &Pda) -> usize {
    if let Some(g) = pda.symbol_stats().regularity() {
        assert!(
            trace.alpha + g <= pda.cols() + 1,
            "alpha {} exceeds K - g + 1 = {}",
            trace.alpha,
            pda.cols() + 1 - g,
        );
    }
    trace.alpha
}

// ---- small bit sets -------------------------------------------------------

#[derive(Clone, PartialEq, Eq)]
struct Bits {
    words: Vec<u64>,
}

impl Bits {
    fn new(capacity: usize) -> Bits {
        Bits { words: vec![0; capacity.div_ceil(64)] }
    }

    fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    fn union_with(&mut self, other: &Bits) {
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w |= o;
        }
    }

    fn intersection_count(&self, other: &Bits) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

fn column_bits(pda: &Pda) -> Vec<Bits> {
    (0..pda.cols())
        .map(|k| {
            let mut b = Bits::new(pda.symbol_count());
            for s in pda.column_symbols(k) {
                b.set(s);
            }
            b
        })
        .collect()
}

// ---- greedy search --------------------------------------------------------

/// Greedy column ordering.
///
/// Opens with the column pair sharing the most symbols, then repeatedly
/// appends the unused column with the largest overlap against the symbols
/// seen so far; once every symbol is covered the remaining columns follow in
/// ascending source order. Ties always resolve to the smallest source index
/// (lexicographically smallest pair for the opening step) and are recorded in
/// the trace. With `lookahead`, tied candidates are expanded one level and
/// the branch offering the larger next overlap wins; ties after lookahead
/// fall back to the smallest index.
///
/// The profile only fixes the expected number of caches; the search itself
/// is profile-independent.
pub fn greedy_order(
    pda: &Pda,
    profile: &Profile,
    lookahead: bool,
) -> Result<(ColumnOrdering, OrderingTrace)> {
    if profile.len() != pda.cols() {
        return Err(Error::Dimension(format!(
            "profile has {} caches, array has {} columns",
            profile.len(),
            pda.cols()
        )));
    }
    let k = pda.cols();
    let sets = column_bits(pda);
    let mut pair_ties = Vec::new();
    let mut column_ties = Vec::new();

    let mut order: Vec<usize> = Vec::with_capacity(k);
    if k == 1 {
        order.push(0);
    } else {
        // Opening pair: largest symbol intersection, lexicographically
        // smallest pair on ties.
        let mut best_score = 0;
        for a in 0..k {
            for b in a + 1..k {
                best_score = best_score.max(sets[a].intersection_count(&sets[b]));
            }
        }
        let mut tied_pairs = Vec::new();
        for a in 0..k {
            for b in a + 1..k {
                if sets[a].intersection_count(&sets[b]) == best_score {
                    tied_pairs.push((a, b));
                }
            }
        }
        if tied_pairs.len() > 1 {
            pair_ties = tied_pairs.clone();
        }
        let mut chosen = tied_pairs[0];
        if lookahead && tied_pairs.len() > 1 {
            let mut best_next = None;
            for &(a, b) in &tied_pairs {
                let mut u = sets[a].clone();
                u.union_with(&sets[b]);
                let next = (0..k)
                    .filter(|&c| c != a && c != b)
                    .map(|c| sets[c].intersection_count(&u))
                    .max()
                    .unwrap_or(0);
                if best_next.map_or(true, |n| next > n) {
                    best_next = Some(next);
                    chosen = (a, b);
                }
            }
        }
        order.push(chosen.0);
        order.push(chosen.1);
    }

    let mut used = vec![false; k];
    for &c in &order {
        used[c] = true;
    }
    let mut seen = Bits::new(pda.symbol_count());
    for &c in &order {
        seen.union_with(&sets[c]);
    }

    while order.len() < k {
        let remaining: Vec<usize> = (0..k).filter(|&c| !used[c]).collect();
        if seen.len() == pda.symbol_count() {
            // Every symbol covered: the tail order no longer matters.
            order.extend(remaining.iter().copied());
            break;
        }
        let best = remaining
            .iter()
            .map(|&c| sets[c].intersection_count(&seen))
            .max()
            .unwrap();
        let tied: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&c| sets[c].intersection_count(&seen) == best)
            .collect();
        if tied.len() > 1 {
            column_ties.push(ColumnTie { position: order.len() + 1, candidates: tied.clone() });
        }
        let mut chosen = tied[0];
        if lookahead && tied.len() > 1 {
            let mut best_next = None;
            for &c in &tied {
                let mut u = seen.clone();
                u.union_with(&sets[c]);
                let next = remaining
                    .iter()
                    .filter(|&&d| d != c)
                    .map(|&d| sets[d].intersection_count(&u))
                    .max()
                    .unwrap_or(0);
                if best_next.map_or(true, |n| next > n) {
                    best_next = Some(next);
                    chosen = c;
                }
            }
        }
        order.push(chosen);
        used[chosen] = true;
        seen.union_with(&sets[chosen]);
    }

    let ordering = ColumnOrdering::new(pda, order)?;
    let mut trace = OrderingTrace::of(&ordering.reordered);
    trace.pair_ties = pair_ties;
    trace.column_ties = column_ties;
    Ok((ordering, trace))
}

// ---- exhaustive search ----------------------------------------------------

/// Result of an exhaustive ordering search.
#[derive(Debug, Clone)]
pub struct ExhaustiveSearch {
    pub ordering: ColumnOrdering,
    pub load: LoadValue,
    /// Leaves of the search tree that were settled (after pruning).
    pub evaluated: u64,
}

/// Minimize the delivery load over all column permutations.
///
/// Permutations that merely swap positions holding equal profile loads are
/// provably load-equal, so only the representative with ascending source
/// columns inside each equal-load run is enumerated. The search refuses to
/// start if the reduced permutation count exceeds `budget`. Among equal-load
/// minima the lexicographically smallest representative is returned, so the
/// result does not depend on evaluation order.
pub fn exhaustive_order(pda: &Pda, profile: &Profile, budget: u64) -> Result<ExhaustiveSearch> {
    if profile.len() != pda.cols() {
        return Err(Error::Dimension(format!(
            "profile has {} caches, array has {} columns",
            profile.len(),
            pda.cols()
        )));
    }
    let k = pda.cols();
    let loads = profile.loads();
    let reduced = reduced_permutation_count(loads);
    if reduced.map_or(true, |n| n > budget as u128) {
        return Err(Error::Budget(format!(
            "{} permutations after symmetry reduction exceed budget {budget}",
            reduced.map_or_else(|| "way too many".to_string(), |n| n.to_string()),
        )));
    }

    let sets = column_bits(pda);
    let set_sizes: Vec<usize> = sets.iter().map(|s| s.len()).collect();
    let mut search = Search {
        k,
        s: pda.symbol_count(),
        loads,
        sets: &sets,
        set_sizes: &set_sizes,
        path: Vec::with_capacity(k),
        used: vec![false; k],
        best_num: u64::MAX,
        best_perm: Vec::new(),
        evaluated: 0,
    };
    search.descend(&Bits::new(pda.symbol_count()), 0);

    let perm = search.best_perm;
    let load = LoadValue::new(search.best_num, pda.rows() as u64);
    Ok(ExhaustiveSearch {
        ordering: ColumnOrdering::new(pda, perm)?,
        load,
        evaluated: search.evaluated,
    })
}

/// Number of permutations left after collapsing equal-load position runs.
fn reduced_permutation_count(loads: &[usize]) -> Option<u128> {
    let mut total: u128 = 1;
    for i in 2..=loads.len() as u128 {
        total = total.checked_mul(i)?;
    }
    let mut run = 1u128;
    for w in loads.windows(2) {
        if w[0] == w[1] {
            run += 1;
            total /= run; // factorial of the run divides k! exactly
        } else {
            run = 1;
        }
    }
    Some(total)
}

struct Search<'a> {
    k: usize,
    s: usize,
    loads: &'a [usize],
    sets: &'a [Bits],
    set_sizes: &'a [usize],
    path: Vec<usize>,
    used: Vec<bool>,
    best_num: u64,
    best_perm: Vec<usize>,
    evaluated: u64,
}

impl Search<'_> {
    fn settle(&mut self, partial: u64) {
        self.evaluated += 1;
        if partial < self.best_num {
            self.best_num = partial;
            // Complete canonically: the untouched tail in ascending order is
            // the lexicographically smallest valid completion.
            let mut perm = self.path.clone();
            perm.extend((0..self.k).filter(|&c| !self.used[c]));
            self.best_perm = perm;
        }
    }

    fn descend(&mut self, seen: &Bits, partial: u64) {
        if seen.len() == self.s || self.path.len() == self.k {
            self.settle(partial);
            return;
        }
        let pos = self.path.len();
        let floor = if pos > 0 && self.loads[pos] == self.loads[pos - 1] {
            self.path[pos - 1]
        } else {
            0
        };
        for c in floor..self.k {
            if self.used[c] {
                continue;
            }
            let new_symbols = self.set_sizes[c] - self.sets[c].intersection_count(seen);
            let next_partial = partial + (self.loads[pos] * new_symbols) as u64;
            if next_partial >= self.best_num {
                continue; // loads are non-negative, the numerator only grows
            }
            let mut next_seen = seen.clone();
            next_seen.union_with(&self.sets[c]);
            self.used[c] = true;
            self.path.push(c);
            self.descend(&next_seen, next_partial);
            self.path.pop();
            self.used[c] = false;
        }
    }
}

// ---- family ordering ------------------------------------------------------

/// Ordering for arrays from [`constructions::construct_b`], read off the
/// (u,v) column labels.
///
/// Positions 1..m take the columns (0,0), (1,0), ..., (m-1,0); position m+1
/// takes the unique column of the last group that misses the one symbol not
/// yet covered; the rest follow in ascending label order. The symbol set is
/// completed exactly at position m+2 and the resulting load matches
/// [`crate::rate::load_const_b_ordered`].
pub fn const_b_order(pda: &Pda, q: usize, m: usize, profile: &Profile) -> Result<ColumnOrdering> {
    let (kk, f, z, s) = constructions::const_b_params(q, m)
        .ok_or_else(|| Error::Argument(format!("bad family parameters q={q}, m={m}")))?;
    if profile.len() != pda.cols() {
        return Err(Error::Dimension(format!(
            "profile has {} caches, array has {} columns",
            profile.len(),
            pda.cols()
        )));
    }
    if (pda.cols(), pda.rows(), pda.stars_per_column(), pda.symbol_count()) != (kk, f, z, s) {
        return Err(Error::Label(format!(
            "array parameters do not match the (q={q}, m={m}) family"
        )));
    }
    let labels = pda
        .col_labels()
        .ok_or_else(|| Error::Label("array carries no (u,v) column labels".into()))?;
    let mut by_label = std::collections::BTreeMap::new();
    for (k, text) in labels.iter().enumerate() {
        let uv = constructions::parse_uv_label(text)
            .ok_or_else(|| Error::Label(format!("unparsable column label {text:?}")))?;
        if uv.0 > m || uv.1 >= q || by_label.insert(uv, k).is_some() {
            return Err(Error::Label(format!("unexpected or repeated column label {text:?}")));
        }
    }
    if by_label.len() != kk {
        return Err(Error::Label("column labels do not cover the family".into()));
    }

    let mut perm: Vec<usize> = (0..=m).map(|u| by_label[&(u, 0)]).collect();
    for (&(_, v), &k) in &by_label {
        if v != 0 {
            perm.push(k);
        }
    }
    let ordering = ColumnOrdering::new(pda, perm)?;
    let trace = OrderingTrace::of(&ordering.reordered);
    if trace.alpha != m + 2 {
        return Err(Error::Label(format!(
            "labels are inconsistent with the family: coverage completes at {} instead of {}",
            trace.alpha,
            m + 2
        )));
    }
    Ok(ordering)
}
