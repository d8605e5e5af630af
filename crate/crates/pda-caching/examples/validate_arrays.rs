//! Validate placement arrays and read the violation report.
//!
//! A cache-level array must satisfy three conditions: every column holds the
//! same number of stars (C1), the symbol ids cover a contiguous range (C2),
//! and every repeated symbol spans distinct rows and columns with stars at
//! both cross positions (C3). The validator collects every violation instead
//! of stopping at the first.

use pda_caching::io::parse_pda_text;
use pda_caching::{GCell, GeneralizedPda};

fn main() {
    let good = "* 3 5 * 1 2\n\
                1 * 6 3 * 4\n\
                2 4 * 5 6 *";
    let pda = parse_pda_text(good).expect("this array is valid");
    println!(
        "valid: {} rows x {} cols, {} stars per column, {} symbols\n",
        pda.rows(),
        pda.cols(),
        pda.stars_per_column(),
        pda.symbol_count()
    );

    // Overwrite one star with a symbol. The column loses a star (C1) and the
    // new entry collides with existing occurrences of the same id.
    let bad = "1 3 5 * 1 2\n\
               1 * 6 3 * 4\n\
               2 4 * 5 6 *";
    match parse_pda_text(bad) {
        Ok(_) => unreachable!(),
        Err(err) => println!("mutated array rejected:\n{err}\n"),
    }

    // User-level arrays carry (symbol, replica) pairs. Replica indices that
    // skip a value are legal but reported as warnings.
    let grid = vec![
        vec![GCell::Pair(0, 1), GCell::Star],
        vec![GCell::Star, GCell::Pair(0, 3)],
    ];
    let gpda = GeneralizedPda::from_grid(grid, vec![0, 1]).expect("valid user-level array");
    println!(
        "user-level array accepted with {} warning(s):",
        gpda.warnings().len()
    );
    for w in gpda.warnings() {
        println!("  {w}");
    }
}
