//! Expand a cache-level array to one column per user.
//!
//! A cache serving L users contributes L copies of its column; copy i turns
//! each symbol s into the pair (s, i). The expansion is what the delivery
//! protocol actually runs against: one XOR message per distinct pair.

use pda_caching::io::parse_pda_text;
use pda_caching::{build_gpda, load_from_gpda, load_from_pda, reduce_to_pda, Profile};

fn main() -> pda_caching::Result<()> {
    let pda = parse_pda_text(
        "* 3 5 * 1 2\n\
         1 * 6 3 * 4\n\
         2 4 * 5 6 *",
    )?;
    let profile: Profile = "5,4,3,2,2,1".parse()?;

    let gpda = build_gpda(&pda, &profile)?;
    println!(
        "{} caches x {} users -> {} columns",
        pda.cols(),
        profile.num_users(),
        gpda.cols()
    );
    for row in 0..gpda.rows() {
        let cells: Vec<String> = (0..gpda.cols())
            .map(|col| format!("{:>4}", gpda.cell(row, col).to_string()))
            .collect();
        println!("{}", cells.join(" "));
    }
    println!(
        "user -> cache: {:?}",
        gpda.user_to_cache()
            .iter()
            .map(|&c| c + 1)
            .collect::<Vec<_>>()
    );

    // Both levels price the delivery identically: a symbol costs as many
    // messages as the population of its first cache-level column.
    let cache_level = load_from_pda(&pda, &profile)?;
    let user_level = load_from_gpda(&gpda);
    println!("cache-level load {cache_level}, user-level load {user_level}");
    assert_eq!(cache_level, user_level);

    // One user per cache collapses the expansion back to the original array.
    let ones = Profile::ones(pda.cols())?;
    let trivial = build_gpda(&pda, &ones)?;
    assert_eq!(reduce_to_pda(&trivial)?, pda);
    println!("one user per cache round-trips to the cache-level array");
    Ok(())
}
