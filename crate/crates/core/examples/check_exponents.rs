//! Admissibility of a few exponent tuples, with the exact deficits.
//!
//! Run with `cargo run --example check_exponents`.

use bhlab::exponents::format_rational;
use bhlab::{
    classical_bh_tuple, is_admissible_exact, is_admissible_fast, reduce_min2, ExponentTuple,
};

fn main() -> bhlab::Result<()> {
    let tuples = [
        vec!["1", "18/10", "3"],
        vec!["4/3", "4/3"],
        vec!["0.9", "2"],
        vec!["3", "4", "5"],
        vec!["1", "2", "2", "2"],
    ];
    for items in &tuples {
        let q = ExponentTuple::parse(items)?;
        let e = is_admissible_exact(&q).expect("rational input");
        let verdict = if e.admissible {
            "admissible"
        } else {
            "inadmissible"
        };
        println!(
            "{:<18} {verdict:<12} max deficit {:>6} at {}, reduced {}",
            q.to_string(),
            format_rational(&e.max_deficit),
            e.maximizer,
            reduce_min2(&q)
        );
    }

    // The full-set sum alone can be below (k+1)/2 while a subset fails.
    let q = ExponentTuple::parse(&["1", "18/10", "3"])?;
    let e = is_admissible_exact(&q).expect("rational input");
    println!(
        "\n{q}: full-set sum {} vs bound {}, witness {}",
        format_rational(&e.full_sum),
        format_rational(&e.full_bound),
        e.witness
    );

    println!("\nclassical tuples:");
    for m in 1..=6 {
        let q = classical_bh_tuple(m)?;
        let r = is_admissible_fast(&q);
        println!("  m = {m}: {q} max deficit {:+.1e}", r.max_deficit);
    }
    Ok(())
}
