//! Operator norms of random-sign bilinear forms grow like n^(3/2).
//!
//! Run with `cargo run --release --example ksz_growth`.

use bhlab::{exact_real, fit_slope, sample_sign_tensor, KszSpec};

fn main() -> bhlab::Result<()> {
    let sides = [4usize, 8, 12, 16];
    let seeds = 0..20u64;
    let mut points = Vec::new();
    println!("{:>4} {:>12} {:>12}", "n", "mean ||T||", "/ n^1.5");
    for &n in &sides {
        let mut logs = Vec::new();
        for seed in seeds.clone() {
            let t = sample_sign_tensor(&KszSpec::new(2, n, seed))?;
            logs.push(exact_real(&t)?.lower.ln());
        }
        let mean_log = logs.iter().sum::<f64>() / logs.len() as f64;
        println!(
            "{n:>4} {:>12.3} {:>12.4}",
            mean_log.exp(),
            mean_log.exp() / (n as f64).powf(1.5)
        );
        points.push(((n as f64).ln(), mean_log));
    }
    let fit = fit_slope(&points)?;
    println!(
        "fitted exponent {:.4} +/- {:.4} (r^2 = {:.4}); expected (k+1)/2 = 1.5",
        fit.slope, fit.stderr, fit.r2
    );
    Ok(())
}
