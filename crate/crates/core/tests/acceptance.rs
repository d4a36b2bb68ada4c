//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.
//!
//! Run with `cargo test --release --test acceptance`.

use std::process::Command;
use std::time::{Duration, Instant};

use bhlab::opnorm::{evaluate, sandwich};
use bhlab::{
    block_restrict, classical_bh_tuple, exact_real, fit_slope, is_admissible_bruteforce,
    is_admissible_fast, lift, mixed_norm, run_experiment, sample_sign_tensor, CoefTensor,
    ExperimentSpec, ExponentTuple, Family, KszSpec, Partition,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn random_tuple(rng: &mut ChaCha8Rng, k_max: usize) -> ExponentTuple {
    let k = rng.random_range(1..=k_max);
    ExponentTuple::new((0..k).map(|_| rng.random_range(0.5..5.0)).collect()).unwrap()
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let tuples: Vec<ExponentTuple> = (0..10_000).map(|_| random_tuple(&mut rng, 12)).collect();
    let start = Instant::now();
    let mut worst = 0.0f64;
    for q in &tuples {
        let fast = is_admissible_fast(q);
        let brute = is_admissible_bruteforce(q).map_err(|e| e.to_string())?;
        ensure(
            fast.admissible == brute.admissible,
            format!("verdicts differ on {q}"),
        )?;
        worst = worst.max((fast.max_deficit - brute.max_deficit).abs());
    }
    let elapsed = start.elapsed();
    ensure(worst <= 1e-12, format!("max_deficit gap {worst:e}"))?;
    ensure(
        elapsed < Duration::from_secs(5),
        format!("took {elapsed:?}"),
    )?;
    Ok(format!(
        "10^4 tuples agree, max deficit gap {worst:e}, {:.2} s",
        elapsed.as_secs_f64()
    ))
}

fn criterion_2() -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_bhlab"))
        .args(["check", "1", "18/10", "3"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), format!("exit status {}", out.status))?;
    let text = String::from_utf8_lossy(&out.stdout).into_owned();
    ensure(
        text.contains("INADMISSIBLE witness={1,2} deficit=1/18"),
        format!("verdict line missing in {text:?}"),
    )?;
    ensure(
        text.contains("full-set sum 1/q_j = 17/9 < (k+1)/2 = 2"),
        format!("full-set line missing in {text:?}"),
    )?;
    Ok("INADMISSIBLE witness={1,2} deficit=1/18, full-set sum 17/9 < 2".into())
}

fn criterion_3() -> Outcome {
    for m in 1..=10 {
        let q = classical_bh_tuple(m).map_err(|e| e.to_string())?;
        for report in [
            is_admissible_fast(&q),
            is_admissible_bruteforce(&q).map_err(|e| e.to_string())?,
        ] {
            ensure(report.admissible, format!("m={m} not admissible"))?;
            ensure(
                report.max_deficit.abs() <= 1e-12,
                format!("m={m} max_deficit {}", report.max_deficit),
            )?;
            ensure(
                report.maximizer.as_slice() == (0..m).collect::<Vec<_>>().as_slice(),
                format!("m={m} maximizer {}", report.maximizer),
            )?;
        }
    }
    Ok("m = 1..10 admissible, max deficit 0 at the full set".into())
}

/// Plain recursive nested sums, no scaling or compensation.
fn nested_oracle(entries: &[f64], n: usize, q: &[f64]) -> f64 {
    if q.is_empty() {
        return entries[0].abs();
    }
    let stride = entries.len() / n;
    let mut sum = 0.0;
    for i in 0..n {
        sum += nested_oracle(&entries[i * stride..(i + 1) * stride], n, &q[1..]).powf(q[0]);
    }
    sum.powf(1.0 / q[0])
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let m = rng.random_range(1..=4);
        let n: usize = rng.random_range(1..=5);
        let len = n.pow(m as u32);
        let entries: Vec<f64> = (0..len).map(|_| rng.random_range(-1.0..1.0)).collect();
        let qs: Vec<f64> = (0..m).map(|_| rng.random_range(0.5..5.0)).collect();
        let t = CoefTensor::real(m, n, entries.clone()).map_err(|e| e.to_string())?;
        let q = ExponentTuple::new(qs.clone()).map_err(|e| e.to_string())?;
        let got = mixed_norm(&t, &q).map_err(|e| e.to_string())?;
        worst = worst.max(rel_err(got, nested_oracle(&entries, n, &qs)));
    }
    ensure(worst <= 1e-12, format!("oracle relative error {worst:e}"))?;

    let mut sign_worst = 0.0f64;
    for seed in 0..200u64 {
        let m = rng.random_range(1..=4);
        let n = rng.random_range(1..=6);
        let t = sample_sign_tensor(&KszSpec::new(m, n, seed)).map_err(|e| e.to_string())?;
        let qs: Vec<f64> = (0..m).map(|_| rng.random_range(0.5..5.0)).collect();
        let expected = (n as f64).powf(qs.iter().map(|q| 1.0 / q).sum());
        let q = ExponentTuple::new(qs).map_err(|e| e.to_string())?;
        let got = mixed_norm(&t, &q).map_err(|e| e.to_string())?;
        sign_worst = sign_worst.max(rel_err(got, expected));
    }
    ensure(
        sign_worst <= 1e-10,
        format!("sign tensor relative error {sign_worst:e}"),
    )?;
    Ok(format!(
        "oracle rel err {worst:e} on 10^3 tensors, sign formula rel err {sign_worst:e}"
    ))
}

fn criterion_5() -> Outcome {
    let l = CoefTensor::littlewood();
    let q = ExponentTuple::parse(&["4/3", "4/3"]).map_err(|e| e.to_string())?;
    let norm = exact_real(&l).map_err(|e| e.to_string())?.lower;
    let mixed = mixed_norm(&l, &q).map_err(|e| e.to_string())?;
    ensure((norm - 2.0).abs() <= 1e-12, format!("norm {norm}"))?;
    ensure(
        (mixed - 2f64.powf(1.5)).abs() <= 1e-12,
        format!("mixed norm {mixed}"),
    )?;
    ensure(
        (mixed / norm - 2f64.sqrt()).abs() <= 1e-12,
        format!("ratio {}", mixed / norm),
    )?;

    let l3 = lift(&l, 3).map_err(|e| e.to_string())?;
    let norm3 = exact_real(&l3).map_err(|e| e.to_string())?.lower;
    ensure((norm3 - 2.0).abs() <= 1e-12, format!("lifted norm {norm3}"))?;
    for tail in ["1/2", "1", "4/3", "3", "100"] {
        let q3 = ExponentTuple::parse(&["4/3", "4/3", tail]).map_err(|e| e.to_string())?;
        let m3 = mixed_norm(&l3, &q3).map_err(|e| e.to_string())?;
        ensure(
            (m3 - mixed).abs() <= 1e-12,
            format!("lifted mixed norm {m3} with q_3 = {tail}"),
        )?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..100u64 {
        let n = rng.random_range(1..=12);
        let entries: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let t = CoefTensor::real(2, n, entries).map_err(|e| e.to_string())?;
        let exact = exact_real(&t).map_err(|e| e.to_string())?.lower;
        let est = sandwich(&t, 4, i).map_err(|e| e.to_string())?;
        let upper = bhlab::bilinear_upper(&t).map_err(|e| e.to_string())?;
        ensure(
            est.lower <= exact * (1.0 + 1e-12),
            format!("instance {i}: lower {} > exact {exact}", est.lower),
        )?;
        ensure(
            exact <= upper * (1.0 + 1e-9),
            format!("instance {i}: exact {exact} > upper {upper}"),
        )?;
    }
    Ok(
        "Littlewood norm 2, mixed 2^1.5, ratio sqrt 2; lift to m=3 preserved; 100 sandwiches hold"
            .into(),
    )
}

const GRID: [usize; 4] = [4, 8, 12, 16];
const SEEDS: std::ops::Range<u64> = 0..20;

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut points = Vec::new();
    for n in GRID {
        let mut logs = Vec::new();
        for seed in SEEDS {
            let t = sample_sign_tensor(&KszSpec::new(2, n, seed)).map_err(|e| e.to_string())?;
            logs.push(exact_real(&t).map_err(|e| e.to_string())?.lower.ln());
        }
        points.push((
            (n as f64).ln(),
            logs.iter().sum::<f64>() / logs.len() as f64,
        ));
    }
    let fit = fit_slope(&points).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(
        (1.35..=1.65).contains(&fit.slope),
        format!("exponent {:.4}", fit.slope),
    )?;
    ensure(
        elapsed < Duration::from_secs(600),
        format!("took {elapsed:?}"),
    )?;
    Ok(format!(
        "exponent {:.4} +/- {:.4} in [1.35, 1.65], {:.2} s",
        fit.slope,
        fit.stderr,
        elapsed.as_secs_f64()
    ))
}

fn scan(q: &[&str]) -> Result<bhlab::ScalingResult, String> {
    let q = ExponentTuple::parse(q).map_err(|e| e.to_string())?;
    let spec = ExperimentSpec::new(q, Family::Ksz, GRID.to_vec(), SEEDS.collect())
        .map_err(|e| e.to_string())?;
    run_experiment(&spec).map_err(|e| e.to_string())
}

fn criterion_7() -> Outcome {
    let growing = scan(&["1", "1"])?;
    let g = growing.fitted_slope().ok_or("no fit for q=(1,1)")?;
    ensure((g - 0.5).abs() <= 0.15, format!("q=(1,1) slope {g:.4}"))?;
    ensure(
        growing.verdict.as_str() == "growing",
        format!("q=(1,1) verdict {}", growing.verdict),
    )?;
    ensure(
        (growing.predicted_slope - 0.5).abs() <= 1e-12,
        format!("q=(1,1) predicted {}", growing.predicted_slope),
    )?;

    let bounded = scan(&["4/3", "4/3"])?;
    let b = bounded.fitted_slope().ok_or("no fit for q=(4/3,4/3)")?;
    ensure(b.abs() <= 0.15, format!("q=(4/3,4/3) slope {b:.4}"))?;
    ensure(
        bounded.verdict.as_str() == "bounded",
        format!("q=(4/3,4/3) verdict {}", bounded.verdict),
    )?;
    Ok(format!(
        "q=(1,1) slope {g:.4} growing; q=(4/3,4/3) slope {b:.4} bounded"
    ))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for case in 0..200 {
        let m = rng.random_range(1..=3);
        let n: usize = rng.random_range(1..=4);
        let entries: Vec<f64> = (0..n.pow(m as u32))
            .map(|_| rng.random_range(-2.0..2.0))
            .collect();
        let t = CoefTensor::real(m, n, entries).map_err(|e| e.to_string())?;
        let qs: Vec<f64> = (0..m).map(|_| rng.random_range(0.5..5.0)).collect();
        let q = ExponentTuple::new(qs.clone()).map_err(|e| e.to_string())?;
        let base = mixed_norm(&t, &q).map_err(|e| e.to_string())?;
        let norm = exact_real(&t).map_err(|e| e.to_string())?;

        let c = rng.random_range(-3.0..3.0);
        let scaled = t.scaled(c);
        let ms = mixed_norm(&scaled, &q).map_err(|e| e.to_string())?;
        ensure(
            (ms - c.abs() * base).abs() <= 1e-12 * base.max(1.0) * 4.0,
            format!(
                "case {case}: mixed norm homogeneity {ms} vs {}",
                c.abs() * base
            ),
        )?;
        let ns = exact_real(&scaled).map_err(|e| e.to_string())?.lower;
        ensure(
            (ns - c.abs() * norm.lower).abs() <= 1e-12 * norm.lower.max(1.0) * 4.0,
            format!("case {case}: operator norm homogeneity"),
        )?;

        let bigger: Vec<f64> = qs.iter().map(|q| q + rng.random_range(0.0..3.0)).collect();
        let qb = ExponentTuple::new(bigger).map_err(|e| e.to_string())?;
        let mb = mixed_norm(&t, &qb).map_err(|e| e.to_string())?;
        ensure(
            mb <= base * (1.0 + 1e-12),
            format!("case {case}: inclusion {mb} > {base}"),
        )?;

        let target = m + rng.random_range(0..=2);
        let lifted = lift(&t, target).map_err(|e| e.to_string())?;
        let nl = exact_real(&lifted).map_err(|e| e.to_string())?.lower;
        ensure(
            (nl - norm.lower).abs() <= 1e-12 * norm.lower.max(1.0),
            format!("case {case}: lifted norm {nl} vs {}", norm.lower),
        )?;
        let ql = if target > m {
            let tail: Vec<f64> = (m..target).map(|_| rng.random_range(0.5..5.0)).collect();
            q.extended(&ExponentTuple::new(tail).map_err(|e| e.to_string())?)
        } else {
            q.clone()
        };
        let ml = mixed_norm(&lifted, &ql).map_err(|e| e.to_string())?;
        ensure(
            (ml - base).abs() <= 1e-12 * base.max(1.0),
            format!("case {case}: lifted mixed norm {ml} vs {base}"),
        )?;

        let mut perm: Vec<usize> = (0..m).collect();
        perm.rotate_left(rng.random_range(0..m));
        let permuted = t.permute_args(&perm).map_err(|e| e.to_string())?;
        let np = exact_real(&permuted).map_err(|e| e.to_string())?.lower;
        ensure(
            (np - norm.lower).abs() <= 1e-12 * norm.lower.max(1.0) * 4.0,
            format!("case {case}: permuted norm {np} vs {}", norm.lower),
        )?;

        let value = evaluate(&t, &norm.argmax_certificate).map_err(|e| e.to_string())?;
        ensure(
            (value - norm.lower).abs() <= 1e-12 * norm.lower.max(1.0),
            format!("case {case}: certificate value {value}"),
        )?;
    }

    let p = Partition::new(vec![2, 1]).map_err(|e| e.to_string())?;
    let t = sample_sign_tensor(&KszSpec::new(3, 3, 0)).map_err(|e| e.to_string())?;
    let r = block_restrict(&t, &p).map_err(|e| e.to_string())?;
    ensure(r.arity() == 2 && r.side() == 3, "block restriction shape")?;
    Ok("homogeneity, l_p inclusion, lift preservation, permutation invariance on 200 forms".into())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("fast and brute-force admissibility agree", criterion_1),
        ("check 1 18/10 3", criterion_2),
        ("classical tuples are admissible with equality", criterion_3),
        ("mixed norm oracle and sign formula", criterion_4),
        ("operator norm ground truth", criterion_5),
        ("random sign growth exponent", criterion_6),
        ("scan slopes and verdicts", criterion_7),
        ("invariant suites", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
