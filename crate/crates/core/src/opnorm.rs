//! Supremum norm of a multilinear form over the unit ball of `(l_inf^n)^m`.
//!
//! * [`exact_real`] enumerates sign vectors of all but the last argument.
//!   A multilinear form attains its supremum at extreme points, and for a
//!   fixed choice of the first `m - 1` arguments the best last argument gives
//!   the `l_1` norm of the partial contraction.
//! * [`ascent_lower`] is an alternating maximization that works for either
//!   scalar field and returns a lower bound.
//! * [`bilinear_upper`] bounds bilinear forms by `n * sigma_max`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::{CoefTensor, Entries, ScalarField};

/// Default cap on `(m - 1) * n` for [`exact_real`].
pub const DEFAULT_VERTEX_BUDGET: usize = 26;

/// Free sign bits handled by one enumeration chunk at most.
const MAX_CHUNK_BITS: usize = 10;

const ASCENT_MAX_SWEEPS: usize = 500;

/// Argument vectors at which a norm estimate is attained.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Certificate {
    Real(Vec<Vec<f64>>),
    /// Unit-modulus phases, serialized as `[re, im]` pairs.
    Complex(Vec<Vec<Complex64>>),
}

impl Certificate {
    pub fn len(&self) -> usize {
        match self {
            Certificate::Real(v) => v.len(),
            Certificate::Complex(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormEstimate {
    pub lower: f64,
    /// `None` when no upper bound is known.
    pub upper: Option<f64>,
    pub exact: bool,
    #[serde(rename = "certificate")]
    pub argmax_certificate: Certificate,
}

/// `|T(x^(1), ..., x^(m))|`.
pub fn evaluate(t: &CoefTensor, args: &Certificate) -> Result<f64> {
    if args.len() != t.arity() {
        return Err(Error::ArityMismatch {
            expected: t.arity(),
            actual: args.len(),
        });
    }
    match (t.entries(), args) {
        (Entries::Real(data), Certificate::Real(xs)) => {
            check_lengths(xs, t.side())?;
            Ok(contract_all(data, t.side(), xs).abs())
        }
        (Entries::Real(data), Certificate::Complex(xs)) => {
            check_lengths(xs, t.side())?;
            let data: Vec<Complex64> = data.iter().map(|&x| Complex64::new(x, 0.0)).collect();
            Ok(contract_all(&data, t.side(), xs).norm())
        }
        (Entries::Complex(data), Certificate::Complex(xs)) => {
            check_lengths(xs, t.side())?;
            Ok(contract_all(data, t.side(), xs).norm())
        }
        (Entries::Complex(data), Certificate::Real(xs)) => {
            check_lengths(xs, t.side())?;
            let xs: Vec<Vec<Complex64>> = xs
                .iter()
                .map(|x| x.iter().map(|&v| Complex64::new(v, 0.0)).collect())
                .collect();
            Ok(contract_all(data, t.side(), &xs).norm())
        }
    }
}

fn check_lengths<S>(xs: &[Vec<S>], side: usize) -> Result<()> {
    match xs.iter().find(|x| x.len() != side) {
        Some(x) => Err(Error::ArityMismatch {
            expected: side,
            actual: x.len(),
        }),
        None => Ok(()),
    }
}

/// `out[s] = sum_i x[i] * data[i * stride + s]`: contracts the leading axis.
fn contract_first<S: Scalar>(data: &[S], x: &[S], out: &mut Vec<S>) {
    let stride = data.len() / x.len();
    out.clear();
    out.resize(stride, S::zero());
    for (i, &xi) in x.iter().enumerate() {
        let row = &data[i * stride..(i + 1) * stride];
        for (o, &v) in out.iter_mut().zip(row) {
            *o += xi * v;
        }
    }
}

fn contract_last<S: Scalar>(data: &[S], x: &[S]) -> Vec<S> {
    data.chunks(x.len())
        .map(|row| {
            row.iter()
                .zip(x)
                .fold(S::zero(), |acc, (&v, &xi)| acc + v * xi)
        })
        .collect()
}

fn contract_all<S: Scalar>(data: &[S], side: usize, xs: &[Vec<S>]) -> S {
    let mut cur = data.to_vec();
    let mut next = Vec::new();
    for x in xs {
        debug_assert_eq!(x.len(), side);
        contract_first(&cur, x, &mut next);
        std::mem::swap(&mut cur, &mut next);
    }
    cur[0]
}

/// Partial contraction of `T` against every argument except slot `skip`.
fn contract_all_but<S: Scalar>(data: &[S], xs: &[Vec<S>], skip: usize) -> Vec<S> {
    let mut cur = data.to_vec();
    for x in xs[skip + 1..].iter().rev() {
        cur = contract_last(&cur, x);
    }
    let mut next = Vec::new();
    for x in &xs[..skip] {
        contract_first(&cur, x, &mut next);
        std::mem::swap(&mut cur, &mut next);
    }
    cur
}

/// Exact norm of a real form by sign-vector enumeration with the default budget.
pub fn exact_real(t: &CoefTensor) -> Result<NormEstimate> {
    exact_real_with_budget(t, DEFAULT_VERTEX_BUDGET)
}

/// Exact norm of a real form; fails with a capacity error when
/// `(m - 1) * n > budget`.
///
/// The first `m - 1` arguments run over `{-1, 1}^n` in Gray-code order with
/// their first coordinate pinned to `+1` (the objective is invariant under
/// negating a whole argument). Table `C_l` holds the contraction of `T` with
/// `x^(1), ..., x^(l)`; flipping one sign of `x^(l)` updates `C_l` by a
/// rank-one slab and rebuilds the smaller tables after it. Low Gray bits
/// belong to the last enumerated argument, so most flips touch only an
/// `n`-vector.
pub fn exact_real_with_budget(t: &CoefTensor, budget: usize) -> Result<NormEstimate> {
    let data = t
        .real_entries()
        .ok_or(Error::FieldMismatch { expected: "real" })?;
    let m = t.arity();
    let n = t.side();
    let enumerated = m - 1;
    let required = (enumerated * n) as u128;
    if required > budget as u128 {
        return Err(Error::Capacity {
            what: "sign enumeration bits (m-1)*n",
            required,
            budget: budget as u128,
        });
    }

    let free_per_arg = n - 1;
    let total_bits = enumerated * free_per_arg;
    let chunk_bits = total_bits.saturating_sub(MAX_CHUNK_BITS);
    let inner_bits = total_bits - chunk_bits;
    let chunks = 1u64 << chunk_bits;
    let layout = Layout {
        data,
        m,
        n,
        free_per_arg,
        inner_bits,
    };

    let results: Vec<(f64, u64)> = (0..chunks)
        .into_par_iter()
        .map(|c| layout.scan_chunk(c))
        .collect();

    // Ties go to the earliest chunk, so the result is independent of scheduling.
    let mut best = (f64::NEG_INFINITY, 0u64);
    for r in results {
        if r.0 > best.0 {
            best = r;
        }
    }

    let mut xs = layout.signs_from_bits(best.1);
    let mut last = data.to_vec();
    let mut next = Vec::new();
    for x in &xs {
        contract_first(&last, x, &mut next);
        std::mem::swap(&mut last, &mut next);
    }
    xs.push(last.iter().map(|&v| v.aligning_unit()).collect());
    let certificate = Certificate::Real(xs);
    let value = evaluate(t, &certificate)?;
    Ok(NormEstimate {
        lower: value,
        upper: Some(value),
        exact: true,
        argmax_certificate: certificate,
    })
}

struct Layout<'a> {
    data: &'a [f64],
    m: usize,
    n: usize,
    free_per_arg: usize,
    inner_bits: usize,
}

impl Layout<'_> {
    /// Maps bit `b` to (argument, coordinate): bit 0 is coordinate 1 of the
    /// last enumerated argument.
    fn bit_position(&self, bit: usize) -> (usize, usize) {
        let arg = self.m - 2 - bit / self.free_per_arg;
        (arg, 1 + bit % self.free_per_arg)
    }

    fn signs_from_bits(&self, bits: u64) -> Vec<Vec<f64>> {
        let mut xs = vec![vec![1.0; self.n]; self.m - 1];
        for bit in 0..(self.m - 1) * self.free_per_arg {
            if bits >> bit & 1 == 1 {
                let (arg, coord) = self.bit_position(bit);
                xs[arg][coord] = -1.0;
            }
        }
        xs
    }

    /// Best vertex among those whose high bits equal `chunk`.
    fn scan_chunk(&self, chunk: u64) -> (f64, u64) {
        let n = self.n;
        let base = chunk << self.inner_bits;
        let mut xs = self.signs_from_bits(base);

        // tables[l] = T contracted with x^(1..l); tables[0] is T itself.
        let mut tables: Vec<Vec<f64>> = Vec::with_capacity(self.m);
        tables.push(self.data.to_vec());
        for l in 0..self.m - 1 {
            let mut next = Vec::new();
            contract_first(&tables[l], &xs[l], &mut next);
            tables.push(next);
        }
        let l1 = |v: &[f64]| v.iter().map(|x| x.abs()).sum::<f64>();

        let mut best = l1(&tables[self.m - 1]);
        let mut best_gray = 0u64;
        for step in 1u64..(1u64 << self.inner_bits) {
            let bit = step.trailing_zeros() as usize;
            let (arg, coord) = self.bit_position(bit);
            let old = xs[arg][coord];
            xs[arg][coord] = -old;

            let (head, tail) = tables.split_at_mut(arg + 1);
            let src = &head[arg];
            let dst = &mut tail[0];
            let stride = dst.len();
            let row = &src[coord * stride..(coord + 1) * stride];
            let delta = -2.0 * old;
            for (d, &v) in dst.iter_mut().zip(row) {
                *d += delta * v;
            }
            for l in arg + 1..self.m - 1 {
                let (head, tail) = tables.split_at_mut(l + 1);
                let mut next = std::mem::take(&mut tail[0]);
                contract_first(&head[l], &xs[l], &mut next);
                tail[0] = next;
            }

            let value = l1(&tables[self.m - 1]);
            if value > best {
                best = value;
                best_gray = step ^ (step >> 1);
            }
        }
        debug_assert_eq!(tables[self.m - 1].len(), n);
        (best, base | best_gray)
    }
}

/// Alternating maximization from `restarts` random starting points.
///
/// Each step replaces one argument by the aligning units (signs or conjugate
/// phases) of its partial contraction; sweeps stop once a full cycle fails to
/// improve the value. Deterministic for a fixed seed.
pub fn ascent_lower(t: &CoefTensor, restarts: usize, seed: u64) -> NormEstimate {
    let restarts = restarts.max(1);
    match t.entries() {
        Entries::Real(data) => {
            let xs = ascent(data, t.arity(), t.side(), restarts, seed);
            finish_ascent(t, Certificate::Real(xs))
        }
        Entries::Complex(data) => {
            let xs = ascent(data, t.arity(), t.side(), restarts, seed);
            finish_ascent(t, Certificate::Complex(xs))
        }
    }
}

fn finish_ascent(t: &CoefTensor, certificate: Certificate) -> NormEstimate {
    let lower = evaluate(t, &certificate).expect("certificate matches tensor shape");
    NormEstimate {
        lower,
        upper: None,
        exact: false,
        argmax_certificate: certificate,
    }
}

fn ascent<S: Scalar>(data: &[S], m: usize, n: usize, restarts: usize, seed: u64) -> Vec<Vec<S>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best_value = f64::NEG_INFINITY;
    let mut best_xs = Vec::new();
    for _ in 0..restarts {
        let mut xs: Vec<Vec<S>> = (0..m)
            .map(|_| (0..n).map(|_| S::random_unit(&mut rng)).collect())
            .collect();
        let mut value = f64::NEG_INFINITY;
        for _ in 0..ASCENT_MAX_SWEEPS {
            let mut sweep_value = 0.0;
            for slot in 0..m {
                let g = contract_all_but(data, &xs, slot);
                xs[slot] = g.iter().map(|&v| v.aligning_unit()).collect();
                sweep_value = g.iter().map(|&v| v.modulus()).sum();
            }
            let improved = sweep_value > value * (1.0 + 1e-14) + 1e-300;
            value = value.max(sweep_value);
            if !improved {
                break;
            }
        }
        if value > best_value {
            best_value = value;
            best_xs = xs;
        }
    }
    best_xs
}

/// `n * sigma_max(A)` for a real bilinear form with coefficient matrix `A`.
pub fn bilinear_upper(t: &CoefTensor) -> Result<f64> {
    if t.arity() != 2 {
        return Err(Error::ArityMismatch {
            expected: 2,
            actual: t.arity(),
        });
    }
    let data = t
        .real_entries()
        .ok_or(Error::FieldMismatch { expected: "real" })?;
    let n = t.side();
    let a = DMatrix::from_row_slice(n, n, data);
    let sigma = a.singular_values().max();
    Ok(n as f64 * sigma)
}

/// Ascent lower bound paired with [`bilinear_upper`]; bilinear real forms only.
pub fn sandwich(t: &CoefTensor, restarts: usize, seed: u64) -> Result<NormEstimate> {
    let upper = bilinear_upper(t)?;
    let mut est = ascent_lower(t, restarts, seed);
    // Rounding in the SVD can put a tight bound a few ulps below the ascent value.
    est.upper = Some(upper.max(est.lower));
    Ok(est)
}

impl NormEstimate {
    pub fn field(&self) -> ScalarField {
        match self.argmax_certificate {
            Certificate::Real(_) => ScalarField::Real,
            Certificate::Complex(_) => ScalarField::Complex,
        }
    }
}
