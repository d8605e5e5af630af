//! Lower the delivery load of a shared-cache scheme by reordering columns.
//!
//! With unequal user counts per cache, the load charges each symbol by the
//! population of the first column where it appears. Moving populous caches
//! to columns that introduce symbols early therefore changes the load, even
//! though all column orders describe the same placement.

use pda_caching::io::parse_pda_text;
use pda_caching::ordering::DEFAULT_PERM_BUDGET;
use pda_caching::{exhaustive_order, greedy_order, load_from_pda, OrderingTrace, Profile};

fn main() -> pda_caching::Result<()> {
    let pda = parse_pda_text(
        "* 3 5 * 1 2\n\
         1 * 6 3 * 4\n\
         2 4 * 5 6 *",
    )?;
    // 17 users behind 6 caches, sorted by population.
    let profile: Profile = "5,4,3,2,2,1".parse()?;

    let as_given = load_from_pda(&pda, &profile)?;
    println!("as given:  load {} = {}", as_given, as_given.decimal(3));

    let (greedy, trace) = greedy_order(&pda, &profile, false)?;
    let greedy_load = load_from_pda(&greedy.reordered, &profile)?;
    println!(
        "greedy:    load {} = {}, permutation {:?}, alpha {}",
        greedy_load,
        greedy_load.decimal(3),
        greedy.perm.iter().map(|k| k + 1).collect::<Vec<_>>(),
        trace.alpha
    );
    println!(
        "           new symbols per column: {:?}",
        new_symbols(&trace)
    );
    if !trace.column_ties.is_empty() {
        println!("           ties were broken toward the lowest column index");
    }

    // The exhaustive search proves the greedy result optimal here. Orders
    // that only permute equal-population caches are skipped as duplicates.
    let search = exhaustive_order(&pda, &profile, DEFAULT_PERM_BUDGET)?;
    println!(
        "optimal:   load {} = {} ({} orderings evaluated)",
        search.load,
        search.load.decimal(3),
        search.evaluated
    );
    Ok(())
}

fn new_symbols(trace: &OrderingTrace) -> Vec<usize> {
    let mut sizes: Vec<usize> = trace.prefix_symbol_sets.iter().map(|s| s.len()).collect();
    for p in (1..sizes.len()).rev() {
        sizes[p] -= sizes[p - 1];
    }
    sizes
}
