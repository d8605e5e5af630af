//! Closed-form ordering and loads for the q-ary array family.
//!
//! For this family the optimal column order is known without searching: put
//! one column of each index group first, then everything else. Its load also
//! has a closed form, evaluated here against the generic per-array formula
//! and against the greedy search.

use pda_caching::constructions::construct_b;
use pda_caching::ordering::const_b_order;
use pda_caching::rate::{load_const_b_ordered, load_const_b_unordered};
use pda_caching::{greedy_order, load_from_pda, Profile};

fn main() -> pda_caching::Result<()> {
    let (q, m) = (3, 2);
    let pda = construct_b(q, m)?;
    // 110 users behind the 9 caches of const-b(3,2).
    let profile: Profile = "30,25,20,10,8,5,5,4,3".parse()?;

    let unordered = load_from_pda(&pda, &profile)?;
    println!(
        "family order as constructed: {} = {}",
        unordered,
        unordered.decimal(3)
    );
    println!(
        "closed form, unordered:      {} = {}",
        load_const_b_unordered(q, m, &profile)?,
        load_const_b_unordered(q, m, &profile)?.decimal(3)
    );

    let ordering = const_b_order(&pda, q, m, &profile)?;
    let ordered = load_from_pda(&ordering.reordered, &profile)?;
    println!(
        "label-driven reordering:     {} = {}  (permutation {:?})",
        ordered,
        ordered.decimal(3),
        ordering.perm.iter().map(|k| k + 1).collect::<Vec<_>>()
    );
    println!(
        "closed form, ordered:        {} = {}",
        load_const_b_ordered(q, m, &profile)?,
        load_const_b_ordered(q, m, &profile)?.decimal(3)
    );

    let (greedy, _) = greedy_order(&pda, &profile, false)?;
    let greedy_load = load_from_pda(&greedy.reordered, &profile)?;
    println!(
        "greedy search agrees:        {} = {}",
        greedy_load,
        greedy_load.decimal(3)
    );

    // The gap closes exactly when the second through (m+2)-th cache
    // populations are all equal.
    let flat: Profile = "9,2,2,2,2,2,2,2,2".parse()?;
    println!(
        "\nflat tail profile: ordered {} vs unordered {}",
        load_const_b_ordered(q, m, &flat)?,
        load_const_b_unordered(q, m, &flat)?
    );
    Ok(())
}
