//! Placement delivery arrays and their validation.
//!
//! A placement delivery array (PDA) with parameters (K, F, Z, S) is an F x K
//! grid whose cells are either a star or a symbol id, subject to:
//!
//!   C1: every column contains exactly Z stars;
//!   C2: every symbol id in [0, S) occurs at least once;
//!   C3: two cells holding the same symbol lie in distinct rows and distinct
//!       columns (C3a), and both cross cells of the 2x2 subarray they span
//!       are stars (C3b).
//!
//! Rows index subfiles, columns index caches. A star at (j, k) means cache k
//! stores subfile j of every file; a symbol marks a multicast opportunity.
//! Symbol ids are 0-based internally and 1-based in files and display.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

// ---- cells ------------------------------------------------------------

/// One cell of a PDA: a star (cached) or a symbol id (transmitted).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cell {
    Star,
    Symbol(usize),
}

impl Cell {
    pub fn is_star(self) -> bool {
        matches!(self, Cell::Star)
    }

    pub fn symbol(self) -> Option<usize> {
        match self {
            Cell::Star => None,
            Cell::Symbol(s) => Some(s),
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Star => write!(f, "*"),
            Cell::Symbol(s) => write!(f, "{}", s + 1),
        }
    }
}

// ---- validation report ------------------------------------------------

/// Which defining condition a violation falls under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ConditionTag {
    C1,
    C2,
    C3a,
    C3b,
    C4,
}

impl fmt::Display for ConditionTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ConditionTag::C1 => "C1",
            ConditionTag::C2 => "C2",
            ConditionTag::C3a => "C3a",
            ConditionTag::C3b => "C3b",
            ConditionTag::C4 => "C4",
        };
        f.write_str(s)
    }
}

/// A single violated condition, with the cells involved (0-based coordinates).
#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub tag: ConditionTag,
    /// (row, column) pairs involved; empty for grid-level findings.
    pub cells: Vec<(usize, usize)>,
    /// Human-readable description (1-based coordinates).
    pub detail: String,
}

/// Everything wrong with a candidate grid. Validation collects all findings
/// instead of stopping at the first, so reports are usable for debugging.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ValidationReport {
    /// Problems that precede condition checks (empty or ragged grid, bad map).
    pub structural: Vec<String>,
    pub violations: Vec<Violation>,
    /// Findings that do not invalidate the array but are worth surfacing.
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.structural.is_empty() && self.violations.is_empty()
    }

    pub fn tags(&self) -> BTreeSet<ConditionTag> {
        self.violations.iter().map(|v| v.tag).collect()
    }

    pub(crate) fn push(&mut self, tag: ConditionTag, cells: Vec<(usize, usize)>, detail: String) {
        self.violations.push(Violation { tag, cells, detail });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.structural {
            writeln!(f, "structure: {s}")?;
        }
        for v in &self.violations {
            writeln!(f, "{}: {}", v.tag, v.detail)?;
        }
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        Ok(())
    }
}

// ---- the array --------------------------------------------------------

/// A validated placement delivery array. Construction goes through
/// [`Pda::from_grid`], so a value of this type always satisfies C1-C3.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pda {
    rows: usize,
    cols: usize,
    stars_per_column: usize,
    symbol_count: usize,
    grid: Vec<Cell>, // row-major
    row_labels: Option<Vec<String>>,
    col_labels: Option<Vec<String>>,
}

impl Pda {
    /// Validate a grid and wrap it. On failure the report lists every
    /// violated condition with coordinates.
    pub fn from_grid(grid: Vec<Vec<Cell>>) -> std::result::Result<Pda, ValidationReport> {
        Pda::from_grid_with_labels(grid, None, None)
    }

    pub fn from_grid_with_labels(
        grid: Vec<Vec<Cell>>,
        row_labels: Option<Vec<String>>,
        col_labels: Option<Vec<String>>,
    ) -> std::result::Result<Pda, ValidationReport> {
        let mut report = ValidationReport::default();
        check_rectangular(&grid, &mut report);
        if !report.structural.is_empty() {
            return Err(report);
        }
        let rows = grid.len();
        let cols = grid[0].len();
        if let Some(ref l) = row_labels {
            if l.len() != rows {
                report.structural.push(format!(
                    "{} row labels for {} rows",
                    l.len(),
                    rows
                ));
            }
        }
        if let Some(ref l) = col_labels {
            if l.len() != cols {
                report.structural.push(format!(
                    "{} column labels for {} columns",
                    l.len(),
                    cols
                ));
            }
        }

        let stars_per_column = check_star_counts(&grid, &mut report);
        let symbol_count = check_symbol_coverage(&grid, &mut report);
        check_symbol_geometry(&grid, &mut report);

        if !report.is_valid() {
            return Err(report);
        }
        let flat = grid.into_iter().flatten().collect();
        Ok(Pda {
            rows,
            cols,
            stars_per_column,
            symbol_count,
            grid: flat,
            row_labels,
            col_labels,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn stars_per_column(&self) -> usize {
        self.stars_per_column
    }

    pub fn symbol_count(&self) -> usize {
        self.symbol_count
    }

    /// Fraction of each file a cache stores, as (Z, F).
    pub fn memory_ratio(&self) -> (usize, usize) {
        (self.stars_per_column, self.rows)
    }

    pub fn cell(&self, row: usize, col: usize) -> Cell {
        self.grid[row * self.cols + col]
    }

    pub fn row_labels(&self) -> Option<&[String]> {
        self.row_labels.as_deref()
    }

    pub fn col_labels(&self) -> Option<&[String]> {
        self.col_labels.as_deref()
    }

    /// The grid as rows of cells (for serialization and display).
    pub fn grid_rows(&self) -> Vec<Vec<Cell>> {
        (0..self.rows)
            .map(|j| (0..self.cols).map(|k| self.cell(j, k)).collect())
            .collect()
    }

    /// Distinct symbols appearing in one column. For a valid array this set
    /// has exactly F - Z elements.
    pub fn column_symbols(&self, col: usize) -> BTreeSet<usize> {
        (0..self.rows).filter_map(|j| self.cell(j, col).symbol()).collect()
    }

    /// Rows where the given column holds a star.
    pub fn star_rows(&self, col: usize) -> BTreeSet<usize> {
        (0..self.rows).filter(|&j| self.cell(j, col).is_star()).collect()
    }

    /// Reorder columns; `perm[p]` names the source column placed at position p.
    pub fn permute_columns(&self, perm: &[usize]) -> Result<Pda> {
        if !is_permutation(perm, self.cols) {
            return Err(Error::Argument(format!(
                "not a permutation of {} columns: {perm:?}",
                self.cols
            )));
        }
        let grid = (0..self.rows)
            .map(|j| perm.iter().map(|&k| self.cell(j, k)).collect())
            .collect();
        let col_labels = self
            .col_labels
            .as_ref()
            .map(|l| perm.iter().map(|&k| l[k].clone()).collect());
        Pda::from_grid_with_labels(grid, self.row_labels.clone(), col_labels)
            .map_err(Error::Invalid)
    }

    /// Reorder rows; `perm[p]` names the source row placed at position p.
    pub fn permute_rows(&self, perm: &[usize]) -> Result<Pda> {
        if !is_permutation(perm, self.rows) {
            return Err(Error::Argument(format!(
                "not a permutation of {} rows: {perm:?}",
                self.rows
            )));
        }
        let grid = perm
            .iter()
            .map(|&j| (0..self.cols).map(|k| self.cell(j, k)).collect())
            .collect();
        let row_labels = self
            .row_labels
            .as_ref()
            .map(|l| perm.iter().map(|&j| l[j].clone()).collect());
        Pda::from_grid_with_labels(grid, row_labels, self.col_labels.clone())
            .map_err(Error::Invalid)
    }

    /// Occurrence counts and column sets per symbol.
    pub fn symbol_stats(&self) -> SymbolStats {
        let mut occurrences = vec![0usize; self.symbol_count];
        let mut columns_of = vec![BTreeSet::new(); self.symbol_count];
        for j in 0..self.rows {
            for k in 0..self.cols {
                if let Cell::Symbol(s) = self.cell(j, k) {
                    occurrences[s] += 1;
                    columns_of[s].insert(k);
                }
            }
        }
        SymbolStats { occurrences, columns_of }
    }
}

/// Per-symbol occurrence statistics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolStats {
    /// occurrences[s] = number of cells holding symbol s.
    pub occurrences: Vec<usize>,
    /// columns_of[s] = set of columns where symbol s appears.
    pub columns_of: Vec<BTreeSet<usize>>,
}

impl SymbolStats {
    /// Some(g) when every symbol occurs exactly g times (a g-regular array).
    pub fn regularity(&self) -> Option<usize> {
        let first = *self.occurrences.first()?;
        self.occurrences.iter().all(|&n| n == first).then_some(first)
    }
}

pub(crate) fn is_permutation(perm: &[usize], n: usize) -> bool {
    if perm.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return false;
        }
        seen[p] = true;
    }
    true
}

// ---- condition checks ---------------------------------------------------
//
// These helpers are shared with the generalized-array validator, which runs
// the same C1-C3 logic over (symbol, replica) pairs.

pub(crate) fn check_rectangular<T>(grid: &[Vec<T>], report: &mut ValidationReport) {
    if grid.is_empty() || grid[0].is_empty() {
        report.structural.push("empty grid".into());
        return;
    }
    let cols = grid[0].len();
    for (j, row) in grid.iter().enumerate() {
        if row.len() != cols {
            report.structural.push(format!(
                "row {} has {} cells, row 1 has {}",
                j + 1,
                row.len(),
                cols
            ));
        }
    }
}

/// C1: uniform star counts, inferred from the first column; 1 <= Z < F.
/// Returns the inferred Z.
pub(crate) fn check_star_counts<T: Copy>(
    grid: &[Vec<T>],
    report: &mut ValidationReport,
) -> usize
where
    T: IsStar,
{
    let rows = grid.len();
    let counts: Vec<usize> = (0..grid[0].len())
        .map(|k| grid.iter().filter(|row| row[k].is_star_cell()).count())
        .collect();
    let z = counts[0];
    for (k, &c) in counts.iter().enumerate().skip(1) {
        if c != z {
            report.push(
                ConditionTag::C1,
                vec![],
                format!("column {} has {} stars, column 1 has {}", k + 1, c, z),
            );
        }
    }
    if z == 0 {
        report.push(ConditionTag::C1, vec![], "columns have no stars (Z = 0)".into());
    } else if z >= rows {
        report.push(
            ConditionTag::C1,
            vec![],
            format!("column 1 is all stars (Z = {z} must be < F = {rows})"),
        );
    }
    z
}

/// C2 over a list of observed ids: ids must cover [0, max]. Returns the
/// inferred count (max + 1), or 0 when no id occurs.
pub(crate) fn check_id_coverage(
    ids: impl Iterator<Item = usize>,
    what: &str,
    tag: ConditionTag,
    report: &mut ValidationReport,
) -> usize {
    let mut seen: Vec<bool> = Vec::new();
    let mut any = false;
    for id in ids {
        if id >= seen.len() {
            seen.resize(id + 1, false);
        }
        seen[id] = true;
        any = true;
    }
    if !any {
        report.push(tag, vec![], format!("no {what} present"));
        return 0;
    }
    for (id, &present) in seen.iter().enumerate() {
        if !present {
            report.push(
                tag,
                vec![],
                format!("{what} ids skip {} (ids present go up to {})", id + 1, seen.len()),
            );
        }
    }
    seen.len()
}

fn check_symbol_coverage(grid: &[Vec<Cell>], report: &mut ValidationReport) -> usize {
    let ids = grid.iter().flatten().filter_map(|c| c.symbol());
    check_id_coverage(ids, "symbol", ConditionTag::C2, report)
}

/// C3 over any entry type with equality: equal entries must lie in distinct
/// rows and columns (C3a) with stars at both cross cells (C3b).
pub(crate) fn check_pair_geometry<T, E>(
    grid: &[Vec<T>],
    entry_of: impl Fn(&T) -> Option<E>,
    is_star: impl Fn(&T) -> bool,
    describe: impl Fn(&E) -> String,
    report: &mut ValidationReport,
) where
    E: Ord + Clone,
{
    use std::collections::BTreeMap;
    let mut occurrences: BTreeMap<E, Vec<(usize, usize)>> = BTreeMap::new();
    for (j, row) in grid.iter().enumerate() {
        for (k, cell) in row.iter().enumerate() {
            if let Some(e) = entry_of(cell) {
                occurrences.entry(e).or_default().push((j, k));
            }
        }
    }
    for (entry, cells) in &occurrences {
        for a in 0..cells.len() {
            for b in a + 1..cells.len() {
                let (j1, k1) = cells[a];
                let (j2, k2) = cells[b];
                if j1 == j2 || k1 == k2 {
                    report.push(
                        ConditionTag::C3a,
                        vec![(j1, k1), (j2, k2)],
                        format!(
                            "{} appears at ({},{}) and ({},{}) sharing a {}",
                            describe(entry),
                            j1 + 1,
                            k1 + 1,
                            j2 + 1,
                            k2 + 1,
                            if j1 == j2 { "row" } else { "column" },
                        ),
                    );
                    continue;
                }
                let cross_a_star = is_star(&grid[j1][k2]);
                let cross_b_star = is_star(&grid[j2][k1]);
                if !cross_a_star || !cross_b_star {
                    report.push(
                        ConditionTag::C3b,
                        vec![(j1, k1), (j2, k2)],
                        format!(
                            "{} at rows {{{},{}}}, cols {{{},{}}}: cross cells are not both stars",
                            describe(entry),
                            j1 + 1,
                            j2 + 1,
                            k1 + 1,
                            k2 + 1,
                        ),
                    );
                }
            }
        }
    }
}

fn check_symbol_geometry(grid: &[Vec<Cell>], report: &mut ValidationReport) {
    check_pair_geometry(
        grid,
        |c| c.symbol(),
        |c| c.is_star(),
        |s| format!("symbol {}", s + 1),
        report,
    );
}

pub(crate) trait IsStar {
    fn is_star_cell(&self) -> bool;
}

impl IsStar for Cell {
    fn is_star_cell(&self) -> bool {
        self.is_star()
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::io::parse_pda_text;

    // Six caches, three subfiles, Z = 1. Reordering its columns is the
    // running example throughout the crate.
    pub(crate) const SIX_CACHE: &str = "\
* 3 5 * 1 2
1 * 6 3 * 4
2 4 * 5 6 *";

    // The same array with columns rearranged as (1,5,6,2,3,4).
    pub(crate) const SIX_CACHE_REORDERED: &str = "\
* 1 2 3 5 *
1 * 4 * 6 3
2 6 * 4 * 5";

    fn six_cache() -> Pda {
        parse_pda_text(SIX_CACHE).unwrap()
    }

    #[test]
    fn six_cache_array_validates() {
        let p = six_cache();
        assert_eq!(
            (p.cols(), p.rows(), p.stars_per_column(), p.symbol_count()),
            (6, 3, 1, 6)
        );
    }

    #[test]
    fn reordered_variant_is_a_column_permutation() {
        let p = six_cache();
        let q = p.permute_columns(&[0, 4, 5, 1, 2, 3]).unwrap();
        let expected = parse_pda_text(SIX_CACHE_REORDERED).unwrap();
        assert_eq!(q.grid_rows(), expected.grid_rows());
    }

    #[test]
    fn all_star_column_pair_reports_missing_symbols() {
        let grid = vec![vec![Cell::Star], vec![Cell::Star]];
        let report = Pda::from_grid(grid).unwrap_err();
        assert!(report.tags().contains(&ConditionTag::C2), "{report}");
    }

    fn c3b_cell_sets(report: &ValidationReport) -> BTreeSet<BTreeSet<(usize, usize)>> {
        report
            .violations
            .iter()
            .filter(|v| v.tag == ConditionTag::C3b)
            .map(|v| v.cells.iter().copied().collect())
            .collect()
    }

    #[test]
    fn star_to_symbol_mutation_breaks_star_counts_and_geometry() {
        // Top-left star changed to symbol id 0 (display 1). Symbol 1 then
        // occupies (1,1), (1,5) and (2,1) in display coordinates, sharing a
        // row and a column with the new cell, and the lost star was the cross
        // cell of the symbol-1 and symbol-2 pairs.
        let mut grid = six_cache().grid_rows();
        grid[0][0] = Cell::Symbol(0);
        let report = Pda::from_grid(grid).unwrap_err();
        let c1 = report.violations.iter().filter(|v| v.tag == ConditionTag::C1).count();
        assert_eq!(c1, 6, "{report}");
        let c3a: BTreeSet<BTreeSet<_>> = report
            .violations
            .iter()
            .filter(|v| v.tag == ConditionTag::C3a)
            .map(|v| v.cells.iter().copied().collect())
            .collect();
        assert_eq!(
            c3a,
            BTreeSet::from([
                BTreeSet::from([(0, 0), (0, 4)]),
                BTreeSet::from([(0, 0), (1, 0)]),
            ]),
            "{report}"
        );
        assert_eq!(
            c3b_cell_sets(&report),
            BTreeSet::from([
                BTreeSet::from([(0, 4), (1, 0)]),
                BTreeSet::from([(0, 5), (2, 0)]),
            ]),
            "{report}"
        );
    }

    #[test]
    fn star_to_symbol_mutation_breaks_cross_pairs_of_other_symbols() {
        // Same cell changed to id 2 (display 3) instead: besides the two
        // pairs that lost their cross star, the new cell pairs with the
        // symbol 3 at (2,4), giving a third bad pair at rows {1,2},
        // cols {1,4} in display coordinates.
        let mut grid = six_cache().grid_rows();
        grid[0][0] = Cell::Symbol(2);
        let report = Pda::from_grid(grid).unwrap_err();
        assert_eq!(
            c3b_cell_sets(&report),
            BTreeSet::from([
                BTreeSet::from([(0, 4), (1, 0)]),
                BTreeSet::from([(0, 5), (2, 0)]),
                BTreeSet::from([(0, 0), (1, 3)]),
            ]),
            "{report}"
        );
        let c3a = report.violations.iter().filter(|v| v.tag == ConditionTag::C3a).count();
        assert_eq!(c3a, 1, "{report}");
    }

    #[test]
    fn skipped_symbol_id_reports_gap() {
        // Ids 1 and 3 (display) with nothing in between.
        let text = "1 *\n* 3";
        let report = parse_pda_text(text).unwrap_err();
        match report {
            Error::Invalid(r) => {
                assert!(r.tags().contains(&ConditionTag::C2), "{r}");
                assert!(r.violations.iter().any(|v| v.detail.contains("skip 2")), "{r}");
            }
            other => panic!("expected validation failure, got {other:?}"),
        }
    }

    #[test]
    fn ragged_and_empty_grids_are_structural_errors() {
        let ragged = vec![vec![Cell::Star, Cell::Symbol(0)], vec![Cell::Star]];
        let report = Pda::from_grid(ragged).unwrap_err();
        assert!(!report.structural.is_empty());
        let report = Pda::from_grid(vec![]).unwrap_err();
        assert!(!report.structural.is_empty());
    }

    #[test]
    fn symbol_stats_of_six_cache_array() {
        let p = six_cache();
        let stats = p.symbol_stats();
        assert!(stats.occurrences.iter().all(|&n| n == 2));
        assert_eq!(stats.regularity(), Some(2));
        assert_eq!(stats.columns_of[0], BTreeSet::from([0, 4]));
        assert_eq!(stats.columns_of[5], BTreeSet::from([2, 4]));
        let nonstar: usize = stats.occurrences.iter().sum();
        assert_eq!(nonstar, p.cols() * (p.rows() - p.stars_per_column()));
    }

    #[test]
    fn every_single_cell_mutation_is_caught_or_yields_a_different_array() {
        // Exhaustive over all cells and all alternative values in
        // [0, S) + star. A mutation must either trip the validator or produce
        // a valid array with different parameters.
        let p = six_cache();
        let base = p.grid_rows();
        let s = p.symbol_count();
        let params = (p.cols(), p.rows(), p.stars_per_column(), p.symbol_count());
        let mut alternatives: Vec<Cell> = (0..s).map(Cell::Symbol).collect();
        alternatives.push(Cell::Star);
        let mut checked = 0;
        for j in 0..p.rows() {
            for k in 0..p.cols() {
                for &alt in &alternatives {
                    if alt == base[j][k] {
                        continue;
                    }
                    let mut grid = base.clone();
                    grid[j][k] = alt;
                    match Pda::from_grid(grid) {
                        Ok(q) => {
                            let new_params =
                                (q.cols(), q.rows(), q.stars_per_column(), q.symbol_count());
                            assert_ne!(new_params, params, "silent mutation at ({j},{k})");
                        }
                        Err(report) => assert!(!report.violations.is_empty(), "{report}"),
                    }
                    checked += 1;
                }
            }
        }
        assert_eq!(checked, 18 * 6);
    }

    #[test]
    fn column_permutation_preserves_parameters() {
        let p = six_cache();
        let q = p.permute_columns(&[5, 4, 3, 2, 1, 0]).unwrap();
        assert_eq!(
            (q.cols(), q.rows(), q.stars_per_column(), q.symbol_count()),
            (6, 3, 1, 6)
        );
        let r = p.permute_rows(&[2, 0, 1]).unwrap();
        assert_eq!(r.symbol_count(), 6);
    }
}
