//! User-level arrays with replicated symbols.
//!
//! When several users share one cache, each of them needs its own copy of
//! every multicast opportunity the cache participates in. The user-level
//! array therefore has one column per user and its non-star entries are
//! (symbol, replica) pairs: replica i is the i-th copy of a symbol handed to
//! the i-th user of some cache. Conditions C1-C3 apply to the pairs exactly
//! as they do to plain symbols, and one extra condition governs replicas:
//!
//!   C4: if one row holds the same symbol (any replicas) in two columns, then
//!       in every other row those two columns are starred together or not at
//!       all.
//!
//! C4 is what lets two users of different caches decode from one message even
//! though their replica indices differ. Missing intermediate replicas, e.g. a
//! symbol with copies 1 and 3 but not 2, waste an index but break nothing, so
//! they are reported as warnings rather than violations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::ordering::Profile;
use crate::pda::{
    check_id_coverage, check_pair_geometry, check_rectangular, check_star_counts, Cell,
    ConditionTag, IsStar, Pda, ValidationReport,
};

/// One cell of a user-level array: a star or a (symbol, replica) pair.
/// Symbols are 0-based internally; replica indices are 1-based everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GCell {
    Star,
    Pair(usize, usize),
}

impl GCell {
    pub fn is_star(self) -> bool {
        matches!(self, GCell::Star)
    }

    pub fn pair(self) -> Option<(usize, usize)> {
        match self {
            GCell::Star => None,
            GCell::Pair(s, i) => Some((s, i)),
        }
    }
}

impl fmt::Display for GCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GCell::Star => write!(f, "*"),
            GCell::Pair(s, i) => write!(f, "{}:{}", s + 1, i),
        }
    }
}

impl IsStar for GCell {
    fn is_star_cell(&self) -> bool {
        self.is_star()
    }
}

/// A validated user-level array. Construction goes through
/// [`GeneralizedPda::from_grid`], so a value of this type satisfies C1-C4 and
/// all users of one cache star the same rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralizedPda {
    rows: usize,
    cols: usize,
    stars_per_column: usize,
    symbol_count: usize,
    max_replica: usize,
    grid: Vec<GCell>, // row-major
    user_to_cache: Vec<usize>,
    row_labels: Option<Vec<String>>,
    col_labels: Option<Vec<String>>,
    warnings: Vec<String>,
}

impl GeneralizedPda {
    pub fn from_grid(
        grid: Vec<Vec<GCell>>,
        user_to_cache: Vec<usize>,
    ) -> std::result::Result<GeneralizedPda, ValidationReport> {
        GeneralizedPda::from_grid_with_labels(grid, user_to_cache, None, None)
    }

    pub fn from_grid_with_labels(
        grid: Vec<Vec<GCell>>,
        user_to_cache: Vec<usize>,
        row_labels: Option<Vec<String>>,
        col_labels: Option<Vec<String>>,
    ) -> std::result::Result<GeneralizedPda, ValidationReport> {
        let mut report = ValidationReport::default();
        check_rectangular(&grid, &mut report);
        if !report.structural.is_empty() {
            return Err(report);
        }
        let rows = grid.len();
        let cols = grid[0].len();
        if user_to_cache.len() != cols {
            report
                .structural
                .push(format!("{} cache ids for {} users", user_to_cache.len(), cols));
        }
        if let Some(ref l) = row_labels {
            if l.len() != rows {
                report.structural.push(format!("{} row labels for {} rows", l.len(), rows));
            }
        }
        if let Some(ref l) = col_labels {
            if l.len() != cols {
                report
                    .structural
                    .push(format!("{} column labels for {} columns", l.len(), cols));
            }
        }
        for (j, row) in grid.iter().enumerate() {
            for (k, cell) in row.iter().enumerate() {
                if let GCell::Pair(_, 0) = cell {
                    report.structural.push(format!(
                        "replica index 0 at ({},{}); replica indices are 1-based",
                        j + 1,
                        k + 1
                    ));
                }
            }
        }
        if !report.structural.is_empty() {
            return Err(report);
        }

        let stars_per_column = check_star_counts(&grid, &mut report);
        let symbol_count = check_id_coverage(
            grid.iter().flatten().filter_map(|c| c.pair().map(|(s, _)| s)),
            "symbol",
            ConditionTag::C2,
            &mut report,
        );
        let max_replica = check_replica_coverage(&grid, symbol_count, &mut report);
        check_pair_geometry(
            &grid,
            |c: &GCell| c.pair(),
            |c: &GCell| c.is_star(),
            |(s, i)| format!("entry {}:{}", s + 1, i),
            &mut report,
        );
        check_replica_compatibility(&grid, &mut report);
        check_cache_groups(&grid, &user_to_cache, &mut report);

        if !report.is_valid() {
            return Err(report);
        }
        let warnings = report.warnings;
        let flat = grid.into_iter().flatten().collect();
        Ok(GeneralizedPda {
            rows,
            cols,
            stars_per_column,
            symbol_count,
            max_replica,
            grid: flat,
            user_to_cache,
            row_labels,
            col_labels,
            warnings,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of users (columns).
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn stars_per_column(&self) -> usize {
        self.stars_per_column
    }

    pub fn symbol_count(&self) -> usize {
        self.symbol_count
    }

    /// Largest replica index appearing anywhere.
    pub fn max_replica(&self) -> usize {
        self.max_replica
    }

    pub fn memory_ratio(&self) -> (usize, usize) {
        (self.stars_per_column, self.rows)
    }

    pub fn cell(&self, row: usize, col: usize) -> GCell {
        self.grid[row * self.cols + col]
    }

    pub fn user_to_cache(&self) -> &[usize] {
        &self.user_to_cache
    }

    pub fn cache_of(&self, user: usize) -> usize {
        self.user_to_cache[user]
    }

    /// Number of distinct caches referenced by the user map.
    pub fn num_caches(&self) -> usize {
        self.user_to_cache.iter().max().map_or(0, |&c| c + 1)
    }

    pub fn row_labels(&self) -> Option<&[String]> {
        self.row_labels.as_deref()
    }

    pub fn col_labels(&self) -> Option<&[String]> {
        self.col_labels.as_deref()
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn grid_rows(&self) -> Vec<Vec<GCell>> {
        (0..self.rows)
            .map(|j| (0..self.cols).map(|k| self.cell(j, k)).collect())
            .collect()
    }

    /// Rows where the given user's column holds a star.
    pub fn star_rows(&self, col: usize) -> BTreeSet<usize> {
        (0..self.rows).filter(|&j| self.cell(j, col).is_star()).collect()
    }
}

/// Replica sanity: collects the largest replica index and warns about holes
/// in any symbol's replica sequence. Returns the overall maximum.
fn check_replica_coverage(
    grid: &[Vec<GCell>],
    symbol_count: usize,
    report: &mut ValidationReport,
) -> usize {
    let mut replicas: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); symbol_count];
    for row in grid {
        for cell in row {
            if let GCell::Pair(s, i) = cell {
                if *s < symbol_count {
                    replicas[*s].insert(*i);
                }
            }
        }
    }
    let mut overall = 0;
    for (s, set) in replicas.iter().enumerate() {
        let max = set.iter().next_back().copied().unwrap_or(0);
        overall = overall.max(max);
        for i in 1..max {
            if !set.contains(&i) {
                report.warnings.push(format!(
                    "symbol {} has replica {} but no replica {}",
                    s + 1,
                    max,
                    i
                ));
            }
        }
    }
    overall
}

/// C4: columns sharing a symbol in some row must star the same other rows.
fn check_replica_compatibility(grid: &[Vec<GCell>], report: &mut ValidationReport) {
    let rows = grid.len();
    for (j1, row) in grid.iter().enumerate() {
        let mut by_symbol: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (k, cell) in row.iter().enumerate() {
            if let GCell::Pair(s, _) = cell {
                by_symbol.entry(*s).or_default().push(k);
            }
        }
        for (s, cols) in &by_symbol {
            for a in 0..cols.len() {
                for b in a + 1..cols.len() {
                    let (k1, k2) = (cols[a], cols[b]);
                    for j2 in 0..rows {
                        if j2 == j1 || grid[j2][k1].is_star() == grid[j2][k2].is_star() {
                            continue;
                        }
                        report.push(
                            ConditionTag::C4,
                            vec![(j1, k1), (j1, k2), (j2, k1), (j2, k2)],
                            format!(
                                "columns {} and {} share symbol {} in row {} but row {} \
                                 stars only one of them",
                                k1 + 1,
                                k2 + 1,
                                s + 1,
                                j1 + 1,
                                j2 + 1,
                            ),
                        );
                    }
                }
            }
        }
    }
}

/// Users of one cache hold the same placement, so their columns must star
/// identical row sets. Not one of the defining conditions, hence structural.
fn check_cache_groups(
    grid: &[Vec<GCell>],
    user_to_cache: &[usize],
    report: &mut ValidationReport,
) {
    let star_rows = |k: usize| -> Vec<usize> {
        grid.iter()
            .enumerate()
            .filter(|(_, row)| row[k].is_star())
            .map(|(j, _)| j)
            .collect()
    };
    let mut reference: BTreeMap<usize, (usize, Vec<usize>)> = BTreeMap::new();
    for (k, &cache) in user_to_cache.iter().enumerate() {
        let rows = star_rows(k);
        match reference.get(&cache) {
            None => {
                reference.insert(cache, (k, rows));
            }
            Some((k0, rows0)) => {
                if rows != *rows0 {
                    report.structural.push(format!(
                        "users {} and {} claim cache {} but star different rows",
                        k0 + 1,
                        k + 1,
                        cache + 1
                    ));
                }
            }
        }
    }
}

// ---- expansion --------------------------------------------------------------

/// Expand a cache-level array into a user-level one.
///
/// Column k of the input serves `profile.loads()[k]` users (profiles are
/// sorted, so reorder columns first if another pairing is wanted). The i-th
/// user of a cache copies its column with every symbol s replaced by the pair
/// (s, i); caches with zero users contribute nothing. Row labels and the
/// originating column's label are carried over.
///
/// The result is validated like any other user-level array. Dropping a
/// zero-user cache can orphan a middle symbol id, in which case the expansion
/// fails with a C2 report instead of returning an array with a gap.
pub fn build_gpda(pda: &Pda, profile: &Profile) -> Result<GeneralizedPda> {
    if profile.len() != pda.cols() {
        return Err(Error::Dimension(format!(
            "profile has {} caches, array has {} columns",
            profile.len(),
            pda.cols()
        )));
    }
    let loads = profile.loads();
    let mut user_to_cache = Vec::with_capacity(profile.num_users());
    for (cache, &load) in loads.iter().enumerate() {
        user_to_cache.extend(std::iter::repeat(cache).take(load));
    }
    let grid: Vec<Vec<GCell>> = (0..pda.rows())
        .map(|j| {
            let mut row = Vec::with_capacity(user_to_cache.len());
            for (cache, &load) in loads.iter().enumerate() {
                for i in 1..=load {
                    row.push(match pda.cell(j, cache) {
                        Cell::Star => GCell::Star,
                        Cell::Symbol(s) => GCell::Pair(s, i),
                    });
                }
            }
            row
        })
        .collect();
    let col_labels = pda.col_labels().map(|labels| {
        let mut out = Vec::with_capacity(user_to_cache.len());
        for (cache, &load) in loads.iter().enumerate() {
            out.extend(std::iter::repeat(labels[cache].clone()).take(load));
        }
        out
    });
    GeneralizedPda::from_grid_with_labels(
        grid,
        user_to_cache,
        pda.row_labels().map(<[String]>::to_vec),
        col_labels,
    )
    .map_err(Error::Invalid)
}

/// Collapse a single-replica user-level array back to a cache-level one.
/// Fails if any replica index exceeds 1.
pub fn reduce_to_pda(gpda: &GeneralizedPda) -> Result<Pda> {
    let mut grid = Vec::with_capacity(gpda.rows());
    for (j, row) in gpda.grid_rows().into_iter().enumerate() {
        let mut out = Vec::with_capacity(row.len());
        for (k, cell) in row.into_iter().enumerate() {
            out.push(match cell {
                GCell::Star => Cell::Star,
                GCell::Pair(s, 1) => Cell::Symbol(s),
                GCell::Pair(s, i) => {
                    return Err(Error::Argument(format!(
                        "replica {}:{} at ({},{}); only single-replica arrays reduce",
                        s + 1,
                        i,
                        j + 1,
                        k + 1
                    )))
                }
            });
        }
        grid.push(out);
    }
    Pda::from_grid_with_labels(
        grid,
        gpda.row_labels().map(<[String]>::to_vec),
        gpda.col_labels().map(<[String]>::to_vec),
    )
    .map_err(Error::Invalid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_pda_text;
    use crate::pda::tests::{SIX_CACHE, SIX_CACHE_REORDERED};
    use crate::rate::{load_from_gpda, LoadValue};

    fn six_cache() -> Pda {
        parse_pda_text(SIX_CACHE).unwrap()
    }

    fn six_profile() -> Profile {
        Profile::normalize(&[5, 4, 3, 2, 2, 1]).unwrap()
    }

    fn star() -> GCell {
        GCell::Star
    }

    // Display-coordinate pair: symbol 1-based, replica 1-based.
    fn p(s: usize, i: usize) -> GCell {
        GCell::Pair(s - 1, i)
    }

    #[test]
    fn cells_render_in_display_coordinates() {
        assert_eq!(p(3, 2).to_string(), "3:2");
        assert_eq!(star().to_string(), "*");
    }

    #[test]
    fn expansion_of_the_six_cache_array() {
        let g = build_gpda(&six_cache(), &six_profile()).unwrap();
        assert_eq!((g.rows(), g.cols()), (3, 17));
        assert_eq!((g.stars_per_column(), g.symbol_count(), g.max_replica()), (1, 6, 5));
        assert_eq!(
            g.user_to_cache(),
            &[0, 0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 3, 3, 4, 4, 5]
        );
        assert!(g.warnings().is_empty());
        assert_eq!(load_from_gpda(&g), LoadValue::new(24, 3));

        // First row in full, plus the last user's other cells.
        let expected_row0 = vec![
            star(), star(), star(), star(), star(),
            p(3, 1), p(3, 2), p(3, 3), p(3, 4),
            p(5, 1), p(5, 2), p(5, 3),
            star(), star(),
            p(1, 1), p(1, 2),
            p(2, 1),
        ];
        assert_eq!(g.grid_rows()[0], expected_row0);
        assert_eq!(g.cell(1, 16), p(4, 1));
        assert_eq!(g.cell(2, 16), star());
    }

    #[test]
    fn expansion_of_the_reordered_array_needs_fewer_messages() {
        let g = build_gpda(
            &parse_pda_text(SIX_CACHE_REORDERED).unwrap(),
            &six_profile(),
        )
        .unwrap();
        assert_eq!(load_from_gpda(&g), LoadValue::new(21, 3));
        // Largest replica per symbol.
        let mut max = vec![0usize; g.symbol_count()];
        for row in g.grid_rows() {
            for cell in row {
                if let GCell::Pair(s, i) = cell {
                    max[s] = max[s].max(i);
                }
            }
        }
        assert_eq!(max, vec![5, 5, 2, 3, 2, 4]);
    }

    #[test]
    fn bumping_a_lone_replica_keeps_the_array_valid() {
        // Replica 4:1 in row 2 of the expanded array also exists elsewhere,
        // so rewriting this copy as 4:2 leaves coverage intact and trips
        // nothing; the load does not change either.
        let g = build_gpda(&six_cache(), &six_profile()).unwrap();
        let mut grid = g.grid_rows();
        assert_eq!(grid[1][16], p(4, 1));
        grid[1][16] = p(4, 2);
        let mutated = GeneralizedPda::from_grid(grid, g.user_to_cache().to_vec()).unwrap();
        assert!(mutated.warnings().is_empty());
        assert_eq!(load_from_gpda(&mutated), LoadValue::new(24, 3));
    }

    #[test]
    fn replica_holes_are_warnings() {
        let grid = vec![
            vec![p(1, 1), star()],
            vec![star(), p(1, 3)],
        ];
        let g = GeneralizedPda::from_grid(grid, vec![0, 1]).unwrap();
        assert_eq!(g.max_replica(), 3);
        assert_eq!(g.warnings().len(), 1);
        assert!(g.warnings()[0].contains("no replica 2"), "{:?}", g.warnings());
    }

    #[test]
    fn mismatched_star_patterns_under_one_symbol_violate_c4() {
        let grid = vec![
            vec![p(1, 1), p(1, 2)],
            vec![star(), p(3, 1)],
            vec![p(2, 1), star()],
        ];
        let report = GeneralizedPda::from_grid(grid, vec![0, 1]).unwrap_err();
        assert_eq!(report.tags(), BTreeSet::from([ConditionTag::C4]), "{report}");
        assert_eq!(report.violations.len(), 2, "{report}");
    }

    #[test]
    fn users_of_one_cache_must_star_the_same_rows() {
        let grid = vec![
            vec![star(), p(1, 2)],
            vec![p(1, 1), star()],
        ];
        let report = GeneralizedPda::from_grid(grid, vec![0, 0]).unwrap_err();
        assert!(!report.is_valid());
        assert!(report.violations.is_empty(), "{report}");
        assert!(report.structural[0].contains("cache 1"), "{report}");
    }

    #[test]
    fn zero_replica_index_is_structural() {
        let grid = vec![vec![GCell::Pair(0, 0)], vec![star()]];
        let report = GeneralizedPda::from_grid(grid, vec![0]).unwrap_err();
        assert!(report.structural[0].contains("1-based"), "{report}");
    }

    #[test]
    fn trailing_zero_load_caches_shrink_the_array() {
        let profile = Profile::normalize(&[1, 1, 0, 0, 0, 0]).unwrap();
        let g = build_gpda(&six_cache(), &profile).unwrap();
        assert_eq!(g.cols(), 2);
        assert_eq!(g.symbol_count(), 4);
        assert_eq!(g.user_to_cache(), &[0, 1]);
    }

    #[test]
    fn orphaning_a_middle_symbol_fails_the_expansion() {
        // Keeping only columns whose symbols are {1,2} and {5,6} leaves ids
        // 3 and 4 without a home.
        let pda = six_cache().permute_columns(&[2, 4, 0, 1, 3, 5]).unwrap();
        let profile = Profile::normalize(&[1, 1, 0, 0, 0, 0]).unwrap();
        match build_gpda(&pda, &profile) {
            Err(Error::Invalid(report)) => {
                assert!(report.tags().contains(&ConditionTag::C2), "{report}")
            }
            other => panic!("expected a coverage failure, got {other:?}"),
        }
    }

    #[test]
    fn single_user_expansion_round_trips() {
        let pda = six_cache();
        let ones = Profile::ones(6).unwrap();
        let g = build_gpda(&pda, &ones).unwrap();
        assert_eq!(reduce_to_pda(&g).unwrap(), pda);

        let labeled = crate::constructions::construct_b(2, 2).unwrap();
        let g = build_gpda(&labeled, &Profile::ones(6).unwrap()).unwrap();
        assert_eq!(g.col_labels().unwrap()[0], labeled.col_labels().unwrap()[0]);
        assert_eq!(reduce_to_pda(&g).unwrap(), labeled);
    }

    #[test]
    fn reduction_refuses_replicated_entries() {
        let g = build_gpda(&six_cache(), &six_profile()).unwrap();
        match reduce_to_pda(&g) {
            Err(Error::Argument(msg)) => assert!(msg.contains("replica"), "{msg}"),
            other => panic!("expected argument error, got {other:?}"),
        }
    }

    #[test]
    fn expansion_rejects_mismatched_profiles() {
        let profile = Profile::normalize(&[1, 1]).unwrap();
        assert!(matches!(build_gpda(&six_cache(), &profile), Err(Error::Dimension(_))));
    }
}
