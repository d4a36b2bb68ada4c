//! Ratio sweeps for an admissible and two inadmissible exponent tuples.
//!
//! Run with `cargo run --release --example scaling_sweep`.

use bhlab::{run_experiment, ExperimentSpec, ExponentTuple, Family};

fn report(label: &str, spec: &ExperimentSpec) -> bhlab::Result<()> {
    let r = run_experiment(spec)?;
    println!("== {label}: q = {}, family {}", r.q, r.family);
    for (log_n, log_ratio) in r.log_points() {
        println!(
            "   n = {:>3}  mean ratio = {:.4}",
            log_n.exp().round(),
            log_ratio.exp()
        );
    }
    match r.fit {
        Some(f) => println!(
            "   fitted slope {:.4} +/- {:.4}, predicted {:.4}, verdict {}",
            f.slope, f.stderr, r.predicted_slope, r.verdict
        ),
        None => println!(
            "   too few sides to fit, predicted {:.4}",
            r.predicted_slope
        ),
    }
    Ok(())
}

fn main() -> bhlab::Result<()> {
    let grid = vec![4, 8, 12, 16];
    let seeds: Vec<u64> = (0..10).collect();

    let q = ExponentTuple::parse(&["1", "1"])?;
    report(
        "inadmissible",
        &ExperimentSpec::new(q, Family::Ksz, grid.clone(), seeds.clone())?,
    )?;

    let q = ExponentTuple::parse(&["4/3", "4/3"])?;
    report(
        "classical",
        &ExperimentSpec::new(q, Family::Ksz, grid, seeds.clone())?,
    )?;

    // The full-set condition holds here, but the subset {1,2} fails by 1/18.
    let q = ExponentTuple::parse(&["1", "18/10", "3"])?;
    let spec = ExperimentSpec::new(
        q,
        Family::KszLifted { base_arity: 2 },
        vec![4, 6, 8, 10],
        seeds,
    )?;
    report("small deficit", &spec)?;
    Ok(())
}
