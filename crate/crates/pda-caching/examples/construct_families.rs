//! Generate the two built-in array families and print them with labels.

use pda_caching::constructions::{const_b_params, construct_b, construct_mn, mn_params};
use pda_caching::io::render_pda_text;
use pda_caching::Pda;

fn show(name: &str, pda: &Pda) {
    println!("{name}: {} rows x {} cols", pda.rows(), pda.cols());
    if let Some(rows) = pda.row_labels() {
        println!("row labels: {}", rows.join(" "));
    }
    if let Some(cols) = pda.col_labels() {
        println!("col labels: {}", cols.join(" "));
    }
    println!("{}", render_pda_text(pda));
    let stats = pda.symbol_stats();
    match stats.regularity() {
        Some(g) => println!("every symbol appears exactly {g} times\n"),
        None => println!("symbol occurrence counts differ\n"),
    }
}

fn main() {
    // t-subset family: rows are the t-subsets of caches, a cell is a star
    // when the cache belongs to the row's subset.
    let (f, z, s) = mn_params(4, 2).unwrap();
    println!("t-subset family, 4 caches, t=2: F={f} Z={z} S={s}");
    show("mn(4,2)", &construct_mn(4, 2).unwrap());

    // q-ary family: K=q(m+1) columns at subpacketization (q-1)q^m, far below
    // the binomial growth of the t-subset family for the same memory ratio.
    let (k, f, z, s) = const_b_params(2, 2).unwrap();
    println!("q-ary family, q=2, m=2: K={k} F={f} Z={z} S={s}");
    show("const-b(2,2)", &construct_b(2, 2).unwrap());

    // The size advantage grows quickly: same caching ratio 1/2, K=8 columns.
    let mn = construct_mn(8, 4).unwrap();
    let qarr = construct_b(2, 3).unwrap();
    println!(
        "8 caches at memory ratio 1/2: t-subset F={} vs q-ary F={}",
        mn.rows(),
        qarr.rows()
    );
}
