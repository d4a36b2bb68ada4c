//! Exact, ascent and spectral estimates of operator norms.
//!
//! Run with `cargo run --release --example operator_norms`.

use bhlab::opnorm::{evaluate, sandwich};
use bhlab::{ascent_lower, bilinear_upper, exact_real, sample_sign_tensor, CoefTensor, KszSpec};

fn main() -> bhlab::Result<()> {
    let lw = CoefTensor::littlewood();
    let e = exact_real(&lw)?;
    println!(
        "Littlewood: ||T|| = {} at {:?}",
        e.lower, e.argmax_certificate
    );

    println!(
        "\n{:>3} {:>10} {:>10} {:>10}",
        "n", "ascent", "exact", "n*smax"
    );
    for n in [4, 8, 12, 16] {
        let t = sample_sign_tensor(&KszSpec::new(2, n, 7))?;
        let s = sandwich(&t, 16, 7)?;
        println!(
            "{n:>3} {:>10.3} {:>10.3} {:>10.3}",
            s.lower,
            exact_real(&t)?.lower,
            bilinear_upper(&t)?
        );
    }

    let t = sample_sign_tensor(&KszSpec::new(3, 8, 3))?;
    let e = exact_real(&t)?;
    println!(
        "\ntrilinear n=8: exact {:.3}, certificate value {:.3}",
        e.lower,
        evaluate(&t, &e.argmax_certificate)?
    );

    let c = t.to_complex();
    println!(
        "complex ascent on the same form: {:.3}",
        ascent_lower(&c, 8, 0).lower
    );
    Ok(())
}
