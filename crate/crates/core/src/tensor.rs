//! Dense coefficient tensors of multilinear forms and their mixed norms.
//!
//! A form `T` of arity `m` on the `n`-dimensional section of `c_0` is stored
//! through its coefficients `T(e_{i_1}, ..., e_{i_m})` in row-major order, the
//! last index running fastest.
//!
//! The mixed norm `l_{q_1, ..., q_k}` is evaluated innermost first: an
//! `l_{q_k}` norm over `i_k`, then `l_{q_{k-1}}` over `i_{k-1}` of those values,
//! and so on out to `l_{q_1}`. Exponents below one give the usual quasi-norm.

use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::ExponentTuple;
use crate::scalar::Scalar;

/// Default cap on the number of stored scalars.
pub const DEFAULT_ENTRY_BUDGET: usize = 1 << 28;

const PAR_THRESHOLD: usize = 1 << 15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarField {
    Real,
    Complex,
}

impl ScalarField {
    pub fn name(self) -> &'static str {
        match self {
            ScalarField::Real => "real",
            ScalarField::Complex => "complex",
        }
    }
}

impl std::str::FromStr for ScalarField {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "real" => Ok(ScalarField::Real),
            "complex" => Ok(ScalarField::Complex),
            other => Err(Error::Invalid(format!("unknown scalar field {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Entries {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

impl Entries {
    pub fn len(&self) -> usize {
        match self {
            Entries::Real(v) => v.len(),
            Entries::Complex(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn field(&self) -> ScalarField {
        match self {
            Entries::Real(_) => ScalarField::Real,
            Entries::Complex(_) => ScalarField::Complex,
        }
    }

    pub fn moduli(&self) -> Vec<f64> {
        match self {
            Entries::Real(v) => v.iter().map(|x| x.abs()).collect(),
            Entries::Complex(v) => v.iter().map(|z| z.norm()).collect(),
        }
    }
}

/// Number of entries of an `m`-index array of side `n`, checked against `budget`.
pub fn entry_count(m: usize, n: usize, budget: usize) -> Result<usize> {
    if m == 0 || n == 0 {
        return Err(Error::Invalid(format!(
            "arity and side must be positive (m={m}, n={n})"
        )));
    }
    let required = (n as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    if required > budget as u128 {
        return Err(Error::Capacity {
            what: "tensor entries",
            required,
            budget: budget as u128,
        });
    }
    Ok(required as usize)
}

/// Coefficients of an `m`-linear form on `n`-dimensional sections.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefTensor {
    arity: usize,
    side: usize,
    entries: Entries,
}

impl CoefTensor {
    pub fn new(arity: usize, side: usize, entries: Entries) -> Result<Self> {
        let len = entry_count(arity, side, usize::MAX)?;
        if entries.len() != len {
            return Err(Error::Invalid(format!(
                "expected {len} entries for m={arity}, n={side}, got {}",
                entries.len()
            )));
        }
        let finite = match &entries {
            Entries::Real(v) => v.iter().all(|x| x.is_finite()),
            Entries::Complex(v) => v.iter().all(|z| Scalar::is_finite(*z)),
        };
        if !finite {
            return Err(Error::Invalid("tensor entries must be finite".into()));
        }
        Ok(Self {
            arity,
            side,
            entries,
        })
    }

    pub fn real(arity: usize, side: usize, entries: Vec<f64>) -> Result<Self> {
        Self::new(arity, side, Entries::Real(entries))
    }

    pub fn complex(arity: usize, side: usize, entries: Vec<Complex64>) -> Result<Self> {
        Self::new(arity, side, Entries::Complex(entries))
    }

    pub fn zeros(arity: usize, side: usize, field: ScalarField) -> Result<Self> {
        let len = entry_count(arity, side, DEFAULT_ENTRY_BUDGET)?;
        let entries = match field {
            ScalarField::Real => Entries::Real(vec![0.0; len]),
            ScalarField::Complex => Entries::Complex(vec![Complex64::new(0.0, 0.0); len]),
        };
        Ok(Self {
            arity,
            side,
            entries,
        })
    }

    /// Real tensor with entries `f(i_1, ..., i_m)` (0-based indices).
    pub fn from_fn(arity: usize, side: usize, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let len = entry_count(arity, side, DEFAULT_ENTRY_BUDGET)?;
        let mut idx = vec![0; arity];
        let mut data = Vec::with_capacity(len);
        for _ in 0..len {
            data.push(f(&idx));
            advance(&mut idx, side);
        }
        Self::real(arity, side, data)
    }

    /// The 2x2 sign matrix `((1, 1), (1, -1))`.
    pub fn littlewood() -> Self {
        Self::real(2, 2, vec![1.0, 1.0, 1.0, -1.0]).expect("valid shape")
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn field(&self) -> ScalarField {
        self.entries.field()
    }

    pub fn entries(&self) -> &Entries {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn real_entries(&self) -> Option<&[f64]> {
        match &self.entries {
            Entries::Real(v) => Some(v),
            Entries::Complex(_) => None,
        }
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.entries.moduli()
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.side + i)
    }

    pub fn to_complex(&self) -> CoefTensor {
        let entries = match &self.entries {
            Entries::Real(v) => {
                Entries::Complex(v.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            }
            Entries::Complex(v) => Entries::Complex(v.clone()),
        };
        CoefTensor { entries, ..*self }
    }

    /// Same coefficients with the field tag changed; real parts are kept when
    /// converting to real, which requires all imaginary parts to vanish.
    pub fn with_field(&self, field: ScalarField) -> Result<CoefTensor> {
        match (field, &self.entries) {
            (ScalarField::Complex, _) => Ok(self.to_complex()),
            (ScalarField::Real, Entries::Real(_)) => Ok(self.clone()),
            (ScalarField::Real, Entries::Complex(v)) => {
                if v.iter().any(|z| z.im != 0.0) {
                    return Err(Error::FieldMismatch {
                        expected: "real-valued",
                    });
                }
                Ok(CoefTensor {
                    entries: Entries::Real(v.iter().map(|z| z.re).collect()),
                    ..*self
                })
            }
        }
    }

    pub fn scaled(&self, c: f64) -> CoefTensor {
        self.scaled_complex(Complex64::new(c, 0.0))
            .with_field(self.field())
            .expect("real scaling keeps the field")
    }

    pub fn scaled_complex(&self, c: Complex64) -> CoefTensor {
        let entries = match &self.entries {
            Entries::Real(v) if c.im == 0.0 => Entries::Real(v.iter().map(|x| x * c.re).collect()),
            Entries::Real(v) => Entries::Complex(v.iter().map(|&x| c * x).collect()),
            Entries::Complex(v) => Entries::Complex(v.iter().map(|&z| c * z).collect()),
        };
        CoefTensor { entries, ..*self }
    }

    /// Reorders the argument slots: slot `s` of the result is slot `perm[s]` of `self`.
    pub fn permute_args(&self, perm: &[usize]) -> Result<CoefTensor> {
        let m = self.arity;
        let mut seen = vec![false; m];
        if perm.len() != m
            || perm
                .iter()
                .any(|&p| p >= m || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::Invalid(format!(
                "{perm:?} is not a permutation of {m} slots"
            )));
        }
        let strides = strides(m, self.side);
        let src_strides: Vec<usize> = perm.iter().map(|&p| strides[p]).collect();
        let gather = |data_len: usize| -> Vec<usize> {
            let mut idx = vec![0; m];
            (0..data_len)
                .map(|_| {
                    let src = idx.iter().zip(&src_strides).map(|(i, s)| i * s).sum();
                    advance(&mut idx, self.side);
                    src
                })
                .collect()
        };
        let map = gather(self.len());
        let entries = match &self.entries {
            Entries::Real(v) => Entries::Real(map.iter().map(|&s| v[s]).collect()),
            Entries::Complex(v) => Entries::Complex(map.iter().map(|&s| v[s]).collect()),
        };
        Ok(CoefTensor { entries, ..*self })
    }

    /// Restriction to the first `side` coordinates of every argument.
    pub fn section(&self, side: usize) -> Result<CoefTensor> {
        if side == 0 || side > self.side {
            return Err(Error::Invalid(format!(
                "section side {side} must lie in 1..={}",
                self.side
            )));
        }
        let len = entry_count(self.arity, side, usize::MAX)?;
        let mut idx = vec![0; self.arity];
        let map: Vec<usize> = (0..len)
            .map(|_| {
                let src = self.flat_index(&idx);
                advance(&mut idx, side);
                src
            })
            .collect();
        let entries = match &self.entries {
            Entries::Real(v) => Entries::Real(map.iter().map(|&s| v[s]).collect()),
            Entries::Complex(v) => Entries::Complex(map.iter().map(|&s| v[s]).collect()),
        };
        Ok(CoefTensor {
            arity: self.arity,
            side,
            entries,
        })
    }

    pub fn from_json_str(text: &str) -> Result<CoefTensor> {
        let file: TensorFile = serde_json::from_str(text)?;
        file.try_into()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&TensorFile::from(self)).expect("tensor serializes")
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<CoefTensor> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json_string() + "\n")?;
        Ok(())
    }
}

/// Row-major odometer step; wraps to all zeros after the last index.
pub(crate) fn advance(idx: &mut [usize], side: usize) {
    for i in idx.iter_mut().rev() {
        *i += 1;
        if *i < side {
            return;
        }
        *i = 0;
    }
}

pub(crate) fn strides(arity: usize, side: usize) -> Vec<usize> {
    let mut s = vec![1; arity];
    for p in (0..arity.saturating_sub(1)).rev() {
        s[p] = s[p + 1] * side;
    }
    s
}

/// On-disk tensor layout: `{"m", "n", "field", "entries"}` with complex
/// entries written as `[re, im]` pairs.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TensorFile {
    m: usize,
    n: usize,
    field: ScalarField,
    entries: Vec<EntryRepr>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum EntryRepr {
    Real(f64),
    Complex([f64; 2]),
}

impl From<&CoefTensor> for TensorFile {
    fn from(t: &CoefTensor) -> Self {
        let entries = match &t.entries {
            Entries::Real(v) => v.iter().map(|&x| EntryRepr::Real(x)).collect(),
            Entries::Complex(v) => v.iter().map(|z| EntryRepr::Complex([z.re, z.im])).collect(),
        };
        TensorFile {
            m: t.arity,
            n: t.side,
            field: t.field(),
            entries,
        }
    }
}

impl TryFrom<TensorFile> for CoefTensor {
    type Error = Error;

    fn try_from(file: TensorFile) -> Result<Self> {
        entry_count(file.m, file.n, DEFAULT_ENTRY_BUDGET)?;
        let entries = match file.field {
            ScalarField::Real => Entries::Real(
                file.entries
                    .into_iter()
                    .map(|e| match e {
                        EntryRepr::Real(x) => Ok(x),
                        EntryRepr::Complex(_) => {
                            Err(Error::Invalid("real tensor has a complex entry".into()))
                        }
                    })
                    .collect::<Result<_>>()?,
            ),
            ScalarField::Complex => Entries::Complex(
                file.entries
                    .into_iter()
                    .map(|e| match e {
                        EntryRepr::Complex([re, im]) => Ok(Complex64::new(re, im)),
                        EntryRepr::Real(_) => Err(Error::Invalid(
                            "complex entries must be [re, im] pairs".into(),
                        )),
                    })
                    .collect::<Result<_>>()?,
            ),
        };
        CoefTensor::new(file.m, file.n, entries)
    }
}

/// Block sizes `(n_1, ..., n_k)`: argument `j` of the restricted array is
/// repeated across `n_j` consecutive slots of the full form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition(Vec<usize>);

impl Partition {
    pub fn new(blocks: Vec<usize>) -> Result<Self> {
        if blocks.is_empty() || blocks.contains(&0) {
            return Err(Error::Invalid(format!(
                "partition blocks must be positive and nonempty, got {blocks:?}"
            )));
        }
        Ok(Partition(blocks))
    }

    /// `(1, ..., 1)` with `m` blocks.
    pub fn trivial(m: usize) -> Result<Self> {
        Self::new(vec![1; m])
    }

    pub fn blocks(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `n_1 + ... + n_k`.
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Partition::new(v)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.0
    }
}

impl std::fmt::Display for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, b) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let blocks = s
            .split(',')
            .map(|b| {
                b.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Invalid(format!("bad partition block {b:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Partition::new(blocks)
    }
}

/// The `k`-index array `S(i_1, ..., i_k) = T(e_{i_1}^{n_1}, ..., e_{i_k}^{n_k})`.
pub fn block_restrict(t: &CoefTensor, p: &Partition) -> Result<CoefTensor> {
    if p.total() != t.arity {
        return Err(Error::ArityMismatch {
            expected: t.arity,
            actual: p.total(),
        });
    }
    let full = strides(t.arity, t.side);
    let mut block_strides = Vec::with_capacity(p.len());
    let mut slot = 0;
    for &size in p.blocks() {
        block_strides.push(full[slot..slot + size].iter().sum::<usize>());
        slot += size;
    }
    let k = p.len();
    let len = entry_count(k, t.side, usize::MAX)?;
    let mut idx = vec![0; k];
    let map: Vec<usize> = (0..len)
        .map(|_| {
            let src = idx.iter().zip(&block_strides).map(|(i, s)| i * s).sum();
            advance(&mut idx, t.side);
            src
        })
        .collect();
    let entries = match &t.entries {
        Entries::Real(v) => Entries::Real(map.iter().map(|&s| v[s]).collect()),
        Entries::Complex(v) => Entries::Complex(map.iter().map(|&s| v[s]).collect()),
    };
    CoefTensor::new(k, t.side, entries)
}

/// Nested `l_{q_1, ..., q_k}` norm of a `k`-index tensor.
pub fn mixed_norm(t: &CoefTensor, q: &ExponentTuple) -> Result<f64> {
    if q.len() != t.arity {
        return Err(Error::ArityMismatch {
            expected: t.arity,
            actual: q.len(),
        });
    }
    let moduli = t.moduli();
    let value = nested_norm(&moduli, t.side, q.values());
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite("mixed norm"))
    }
}

/// `(sum |entry|^q)^(1/q)` over all entries.
pub fn flat_qnorm(t: &CoefTensor, q: f64) -> Result<f64> {
    if !(q.is_finite() && q > 0.0) {
        return Err(Error::InvalidExponent(format!(
            "{q} is not a positive finite number"
        )));
    }
    let value = lp_norm(&t.moduli(), q);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite("flat norm"))
    }
}

/// Reduction over the outermost index runs in parallel for large inputs;
/// each slab is reduced independently, so the result does not depend on the
/// number of workers.
fn nested_norm(moduli: &[f64], side: usize, q: &[f64]) -> f64 {
    if q.len() == 1 {
        return lp_norm(moduli, q[0]);
    }
    let slab = moduli.len() / side;
    let inner: Vec<f64> = if moduli.len() >= PAR_THRESHOLD {
        moduli
            .par_chunks(slab)
            .map(|s| nested_norm(s, side, &q[1..]))
            .collect()
    } else {
        let mut level = moduli.to_vec();
        for &p in q[1..].iter().rev() {
            level = level.chunks(side).map(|c| lp_norm(c, p)).collect();
        }
        level
    };
    lp_norm(&inner, q[0])
}

/// `l_p` (quasi-)norm of nonnegative values, scaled by the maximum so the
/// power sum stays in `[1, len]`.
fn lp_norm(values: &[f64], p: f64) -> f64 {
    let max = values.iter().copied().fold(0.0f64, f64::max);
    if max == 0.0 || !max.is_finite() {
        return max;
    }
    let sum = neumaier_sum(values.iter().map(|&v| (v / max).powf(p)));
    max * sum.powf(1.0 / p)
}

fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
