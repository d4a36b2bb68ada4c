//! Lifting a bilinear random form to arity three.
//!
//! For q = (1, 18/10, 3) the subset {1,2} has deficit 1/18. Lifting a random
//! bilinear form keeps its operator norm and the mixed norm only sees the
//! first two exponents, so the ratio inherits the growth of the bilinear case.
//!
//! Run with `cargo run --release --example lift_counterexample`.

use bhlab::{
    exact_real, is_admissible_fast, lift, mixed_norm, sample_sign_tensor, ExponentTuple, KszSpec,
};

fn main() -> bhlab::Result<()> {
    let q = ExponentTuple::parse(&["1", "18/10", "3"])?;
    let report = is_admissible_fast(&q);
    println!(
        "q = {q}: witness {}, deficit {:.5}",
        report.witness, report.max_deficit
    );

    println!(
        "{:>3} {:>10} {:>10} {:>10} {:>8}",
        "n", "||T_2||", "||T_3||", "mixed", "ratio"
    );
    for n in [4, 6, 8, 10] {
        let t2 = sample_sign_tensor(&KszSpec::new(2, n, 0))?;
        let t3 = lift(&t2, 3)?;
        let n2 = exact_real(&t2)?.lower;
        let n3 = exact_real(&t3)?.lower;
        let mixed = mixed_norm(&t3, &q)?;
        println!(
            "{n:>3} {n2:>10.3} {n3:>10.3} {mixed:>10.3} {:>8.4}",
            mixed / n3
        );
    }
    Ok(())
}
