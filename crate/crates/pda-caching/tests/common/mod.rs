//! Fixtures and independent oracles shared by the integration suites.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use pda_caching::constructions::{construct_b, construct_mn};
use pda_caching::io::parse_pda_text;
use pda_caching::{Cell, ConditionTag, Pda};

/// 3x6 array for 6 caches at memory ratio 1/3, 6 symbols.
pub const SIX_CACHE: &str = "* 3 5 * 1 2\n1 * 6 3 * 4\n2 4 * 5 6 *";

/// The same array with columns reordered (sources 1,5,6,2,3,4); load drops
/// from 8 to 7 under the profile below.
pub const SIX_CACHE_REORDERED: &str = "* 1 2 3 5 *\n1 * 4 * 6 3\n2 6 * 4 * 5";

/// 17 users behind the six caches, sorted.
pub const SIX_CACHE_PROFILE: [usize; 6] = [5, 4, 3, 2, 2, 1];

/// 110 users behind the nine caches of the (q=3, m=2) family, sorted.
pub const EX2_PROFILE: [usize; 9] = [30, 25, 20, 10, 8, 5, 5, 4, 3];

/// 18x9 q-ary family array (q=3, m=2) in construction order. Symbols are the
/// base-3 pairs written as 1-based decimals: (s1,s0) -> 3*s1 + s0 + 1.
pub const TABLE_I_TEXT: &str = "\
2 * * 4 * * * 1 *
* 3 * 5 * * * * 2
* * 1 6 * * 3 * *
5 * * * 7 * * * 4
* 6 * * 8 * 5 * *
* * 4 * 9 * * 6 *
8 * * * * 1 7 * *
* 9 * * * 2 * 8 *
* * 7 * * 3 * * 9
3 * * 7 * * * * 1
* 1 * 8 * * 2 * *
* * 2 9 * * * 3 *
6 * * * 1 * 4 * *
* 4 * * 2 * * 5 *
* * 5 * 3 * * * 6
9 * * * * 4 * 7 *
* 7 * * * 5 * * 8
* * 8 * * 6 9 * *";

pub const TABLE_I_ROW_LABELS: [&str; 18] = [
    "(0,0,0)",
    "(0,0,1)",
    "(0,0,2)",
    "(0,1,0)",
    "(0,1,1)",
    "(0,1,2)",
    "(0,2,0)",
    "(0,2,1)",
    "(0,2,2)",
    "(1,0,0)",
    "(1,0,1)",
    "(1,0,2)",
    "(1,1,0)",
    "(1,1,1)",
    "(1,1,2)",
    "(1,2,0)",
    "(1,2,1)",
    "(1,2,2)",
];

pub const TABLE_I_COL_LABELS: [&str; 9] = [
    "(0,0)",
    "(0,1)",
    "(0,2)",
    "(1,0)",
    "(1,1)",
    "(1,2)",
    "(2,0)",
    "(2,1)",
    "(2,2)",
];

/// The same array under the load-minimizing column order
/// (0,0),(1,0),(2,0),(0,1),(0,2),(1,1),(1,2),(2,1),(2,2).
pub const TABLE_II_TEXT: &str = "\
2 4 * * * * * 1 *
* 5 * 3 * * * * 2
* 6 3 * 1 * * * *
5 * * * * 7 * * 4
* * 5 6 * 8 * * *
* * * * 4 9 * 6 *
8 * 7 * * * 1 * *
* * * 9 * * 2 8 *
* * * * 7 * 3 * 9
3 7 * * * * * * 1
* 8 2 1 * * * * *
* 9 * * 2 * * 3 *
6 * 4 * * 1 * * *
* * * 4 * 2 * 5 *
* * * * 5 3 * * 6
9 * * * * * 4 7 *
* * * 7 * * 5 * 8
* * 9 * 8 * 6 * *";

/// Source columns of TABLE_II within TABLE_I, 0-based.
pub const TABLE_II_PERM: [usize; 9] = [0, 3, 6, 1, 2, 4, 5, 7, 8];

// ---- corpus ---------------------------------------------------------------

pub struct CorpusEntry {
    pub name: String,
    pub pda: Pda,
    /// Sorted non-increasing user counts, one per column.
    pub profile: Vec<usize>,
}

fn corpus_bases() -> Vec<(String, Pda)> {
    let mut bases = vec![
        ("six-cache".to_string(), parse_pda_text(SIX_CACHE).unwrap()),
        (
            "six-cache-reordered".to_string(),
            parse_pda_text(SIX_CACHE_REORDERED).unwrap(),
        ),
    ];
    for &(caches, t) in &[
        (2, 1),
        (3, 1),
        (3, 2),
        (4, 1),
        (4, 2),
        (4, 3),
        (5, 2),
        (5, 3),
        (5, 4),
        (6, 2),
        (6, 3),
        (7, 3),
    ] {
        bases.push((
            format!("mn({caches},{t})"),
            construct_mn(caches, t).unwrap(),
        ));
    }
    for &(q, m) in &[(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (4, 1), (5, 1)] {
        bases.push((format!("const-b({q},{m})"), construct_b(q, m).unwrap()));
    }
    bases
}

pub fn random_permutation(rng: &mut StdRng, n: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    perm
}

pub fn random_sorted_profile(rng: &mut StdRng, len: usize) -> Vec<usize> {
    let mut loads: Vec<usize> = (0..len).map(|_| rng.gen_range(1..=5)).collect();
    loads.sort_unstable_by(|a, b| b.cmp(a));
    loads
}

/// Drop one column and relabel the surviving symbols contiguously. Star
/// counts and pair geometry are untouched, so the result stays valid.
fn drop_column(pda: &Pda, drop: usize) -> Pda {
    let grid = pda.grid_rows();
    let mut ids = BTreeSet::new();
    for row in &grid {
        for (k, cell) in row.iter().enumerate() {
            if k != drop {
                if let Cell::Symbol(s) = cell {
                    ids.insert(*s);
                }
            }
        }
    }
    let rank: BTreeMap<usize, usize> = ids.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let reduced: Vec<Vec<Cell>> = grid
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(k, _)| *k != drop)
                .map(|(_, cell)| match cell {
                    Cell::Star => Cell::Star,
                    Cell::Symbol(s) => Cell::Symbol(rank[s]),
                })
                .collect()
        })
        .collect();
    Pda::from_grid(reduced).expect("column subsets of valid arrays stay valid")
}

/// Deterministic corpus of valid arrays with per-entry sorted profiles.
/// Every entry satisfies rows * cols <= 400.
pub fn corpus() -> Vec<CorpusEntry> {
    let mut entries = Vec::new();
    for (base_index, (name, base)) in corpus_bases().into_iter().enumerate() {
        let mut rng = StdRng::seed_from_u64(0x5EED_0000 + base_index as u64);
        let mut variants: Vec<(String, Pda)> = vec![(format!("{name} as built"), base.clone())];
        for v in 0..3 {
            let perm = random_permutation(&mut rng, base.cols());
            variants.push((
                format!("{name} column shuffle {v}"),
                base.permute_columns(&perm).unwrap(),
            ));
        }
        for v in 0..3 {
            let perm = random_permutation(&mut rng, base.rows());
            variants.push((
                format!("{name} row shuffle {v}"),
                base.permute_rows(&perm).unwrap(),
            ));
        }
        for v in 0..2 {
            let cols = random_permutation(&mut rng, base.cols());
            let rows = random_permutation(&mut rng, base.rows());
            variants.push((
                format!("{name} shuffle {v}"),
                base.permute_columns(&cols).unwrap().permute_rows(&rows).unwrap(),
            ));
        }
        if base.cols() >= 3 {
            let drop = rng.gen_range(0..base.cols());
            variants.push((
                format!("{name} minus column {}", drop + 1),
                drop_column(&base, drop),
            ));
        }
        for (variant_name, pda) in variants {
            assert!(
                pda.rows() * pda.cols() <= 400,
                "{variant_name} exceeds the size cap"
            );
            let profile = random_sorted_profile(&mut rng, pda.cols());
            entries.push(CorpusEntry { name: variant_name, pda, profile });
        }
    }
    entries
}

// ---- independent validator oracle ------------------------------------------

/// Recomputes which conditions a grid breaks, by direct definition: equal
/// star counts strictly between 0 and the row count (C1), contiguous symbol
/// ids (C2), repeated symbols in distinct rows and columns (C3a) with stars
/// at both cross positions (C3b). Written without reference to the library
/// validator so the two can check each other.
pub fn naive_condition_tags(grid: &[Vec<Cell>]) -> BTreeSet<ConditionTag> {
    let rows = grid.len();
    let cols = grid[0].len();
    let mut tags = BTreeSet::new();

    let counts: Vec<usize> = (0..cols)
        .map(|k| (0..rows).filter(|&j| grid[j][k] == Cell::Star).count())
        .collect();
    if counts.iter().any(|&c| c != counts[0]) || counts[0] == 0 || counts[0] >= rows {
        tags.insert(ConditionTag::C1);
    }

    let mut ids = BTreeSet::new();
    for row in grid {
        for cell in row {
            if let Cell::Symbol(s) = cell {
                ids.insert(*s);
            }
        }
    }
    if let Some(&max) = ids.iter().next_back() {
        if (0..=max).any(|s| !ids.contains(&s)) {
            tags.insert(ConditionTag::C2);
        }
    }

    let mut occurrences: Vec<(usize, usize, usize)> = Vec::new();
    for (j, row) in grid.iter().enumerate() {
        for (k, cell) in row.iter().enumerate() {
            if let Cell::Symbol(s) = cell {
                occurrences.push((*s, j, k));
            }
        }
    }
    for a in 0..occurrences.len() {
        for b in a + 1..occurrences.len() {
            let (s1, j1, k1) = occurrences[a];
            let (s2, j2, k2) = occurrences[b];
            if s1 != s2 {
                continue;
            }
            if j1 == j2 || k1 == k2 {
                tags.insert(ConditionTag::C3a);
            } else if grid[j1][k2] != Cell::Star || grid[j2][k1] != Cell::Star {
                tags.insert(ConditionTag::C3b);
            }
        }
    }
    tags
}
