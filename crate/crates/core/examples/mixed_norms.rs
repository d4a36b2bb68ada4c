//! Mixed norms, block restriction and the sign-tensor formula.
//!
//! Run with `cargo run --example mixed_norms`.

use bhlab::{
    block_restrict, flat_qnorm, mixed_norm, sample_sign_tensor, CoefTensor, ExponentTuple, KszSpec,
    Partition,
};

fn main() -> bhlab::Result<()> {
    let ones = CoefTensor::from_fn(2, 3, |_| 1.0)?;
    let q = ExponentTuple::parse(&["2", "1"])?;
    println!(
        "all-ones 3x3, q = {q}: {:.6} (3^1.5 = {:.6})",
        mixed_norm(&ones, &q)?,
        3f64.powf(1.5)
    );

    let lw = CoefTensor::littlewood();
    let q = ExponentTuple::parse(&["4/3", "4/3"])?;
    println!("Littlewood, q = {q}: {:.6}", mixed_norm(&lw, &q)?);

    let diag = CoefTensor::from_fn(2, 3, |i| if i[0] == i[1] { 1.0 } else { 0.0 })?;
    let q = ExponentTuple::parse(&["1", "3"])?;
    println!("identity 3x3, q = {q}: {:.6}", mixed_norm(&diag, &q)?);

    // Block restriction keeps the entries T(e_i, e_i, e_j).
    let t = sample_sign_tensor(&KszSpec::new(3, 6, 1))?;
    let p: Partition = "2,1".parse()?;
    let r = block_restrict(&t, &p)?;
    let q = ExponentTuple::parse(&["1", "2"])?;
    println!(
        "random signs m=3, partition {p}, q = {q}: {:.6} (6^1.5 = {:.6})",
        mixed_norm(&r, &q)?,
        6f64.powf(1.5)
    );

    let t = sample_sign_tensor(&KszSpec::new(3, 5, 2))?;
    let q = ExponentTuple::new(vec![1.5; 3])?;
    println!(
        "equal exponents: mixed {:.6}, flat {:.6}",
        mixed_norm(&t, &q)?,
        flat_qnorm(&t, 1.5)?
    );
    Ok(())
}
