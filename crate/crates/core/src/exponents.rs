//! Admissibility of exponent tuples for mixed-norm inequalities.
//!
//! A tuple `(q_1, ..., q_k)` of positive exponents is *admissible* when every
//! nonempty index subset `A` satisfies
//!
//! ```text
//! sum_{j in A} 1/q_j <= (|A| + 1) / 2
//! ```
//!
//! The signed slack `sum_{j in A} 1/q_j - (|A| + 1)/2` is called the
//! *deficit* of `A`. Because the deficit is additive over elements
//! (`deficit(A) = sum_{j in A} (1/q_j - 1/2) - 1/2`), the worst subset is
//! `{j : q_j < 2}` whenever that set is nonempty, and the whole family of
//! subset conditions collapses to the single condition
//! `sum_j 1/min(q_j, 2) <= (k + 1)/2`. [`is_admissible_fast`] uses that
//! reduction; [`is_admissible_bruteforce`] enumerates all `2^k - 1` subsets
//! and serves as its oracle.
//!
//! Values are stored as `f64`. Tuples parsed from rational or decimal text also
//! keep an exact [`BigRational`] copy so boundary cases can be decided without
//! rounding (see [`is_admissible_exact`]).

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the deficit used to classify boundary tuples such as
/// `2m/(m+1)` as admissible.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Largest tuple length accepted by [`is_admissible_bruteforce`].
pub const MAX_BRUTE_K: usize = 24;

/// Ordered list of exponents `q_j` in `(0, inf)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentTuple {
    values: Vec<f64>,
    exact: Option<Vec<BigRational>>,
}

impl ExponentTuple {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidExponent("tuple must be nonempty".into()));
        }
        for &q in &values {
            check_exponent(q)?;
        }
        Ok(Self {
            values,
            exact: None,
        })
    }

    pub fn from_rationals(exact: Vec<BigRational>) -> Result<Self> {
        if exact.is_empty() {
            return Err(Error::InvalidExponent("tuple must be nonempty".into()));
        }
        let mut values = Vec::with_capacity(exact.len());
        for r in &exact {
            if !r.is_positive() {
                return Err(Error::InvalidExponent(format!("{r} is not positive")));
            }
            let v = rational_to_f64(r);
            check_exponent(v)?;
            values.push(v);
        }
        Ok(Self {
            values,
            exact: Some(exact),
        })
    }

    /// Parses each item as `a/b`, a decimal, or any float literal.
    ///
    /// The exact copy is kept only if every item had an exact form.
    pub fn parse<S: AsRef<str>>(items: &[S]) -> Result<Self> {
        let parsed: Vec<Exponent> = items
            .iter()
            .map(|s| s.as_ref().parse())
            .collect::<Result<_>>()?;
        Self::from_exponents(parsed)
    }

    fn from_exponents(parsed: Vec<Exponent>) -> Result<Self> {
        if parsed.iter().all(|e| e.exact.is_some()) {
            Self::from_rationals(parsed.into_iter().map(|e| e.exact.unwrap()).collect())
        } else {
            Self::new(parsed.into_iter().map(|e| e.value).collect())
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn exact(&self) -> Option<&[BigRational]> {
        self.exact.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Concatenates `self` with `tail`, keeping the exact copy only if both have one.
    pub fn extended(&self, tail: &ExponentTuple) -> ExponentTuple {
        let values = self.values.iter().chain(&tail.values).copied().collect();
        let exact = match (&self.exact, &tail.exact) {
            (Some(a), Some(b)) => Some(a.iter().chain(b).cloned().collect()),
            _ => None,
        };
        ExponentTuple { values, exact }
    }

    /// Exponents at the given positions, in the given order.
    pub fn select(&self, indices: &[usize]) -> Result<ExponentTuple> {
        check_subset(indices, self.len())?;
        Ok(ExponentTuple {
            values: indices.iter().map(|&i| self.values[i]).collect(),
            exact: self
                .exact
                .as_ref()
                .map(|e| indices.iter().map(|&i| e[i].clone()).collect()),
        })
    }
}

impl fmt::Display for ExponentTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = match &self.exact {
            Some(ex) => ex.iter().map(format_rational).collect(),
            None => self.values.iter().map(|v| v.to_string()).collect(),
        };
        write!(f, "({})", parts.join(", "))
    }
}

fn check_exponent(q: f64) -> Result<()> {
    if q.is_finite() && q > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidExponent(format!(
            "{q} is not a positive finite number"
        )))
    }
}

/// One parsed exponent: its float value and, when the text allowed it, the exact rational.
#[derive(Clone, Debug, PartialEq)]
pub struct Exponent {
    pub value: f64,
    pub exact: Option<BigRational>,
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let exact = parse_exact(s);
        let value = match &exact {
            Some(r) => {
                if !r.is_positive() {
                    return Err(Error::InvalidExponent(format!("{s} is not positive")));
                }
                rational_to_f64(r)
            }
            None => s
                .parse::<f64>()
                .map_err(|_| Error::InvalidExponent(format!("cannot parse {s:?}")))?,
        };
        check_exponent(value)?;
        Ok(Exponent { value, exact })
    }
}

/// Parses `a/b` or a plain decimal literal (optionally with an `e` exponent) exactly.
pub fn parse_exact(s: &str) -> Option<BigRational> {
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_decimal(num.trim())?;
        let den = parse_decimal(den.trim())?;
        if den.is_zero() {
            return None;
        }
        return Some(num / den);
    }
    parse_decimal(s)
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (mantissa, exp10) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    if exp10.abs() > 400 {
        return None;
    }
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .bytes()
        .chain(frac_part.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(digits.parse::<BigInt>().ok()?);
    let shift = exp10 - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    if shift >= 0 {
        value *= num_traits::pow(ten, shift as usize);
    } else {
        value /= num_traits::pow(ten, (-shift) as usize);
    }
    if negative {
        value = -value;
    }
    Some(value)
}

fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `a/b` in lowest terms, or `a` for integers.
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl Serialize for ExponentTuple {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.len()))?;
        match &self.exact {
            Some(ex) => {
                for r in ex {
                    seq.serialize_element(&format_rational(r))?;
                }
            }
            None => {
                for v in &self.values {
                    seq.serialize_element(v)?;
                }
            }
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for ExponentTuple {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Item {
            Num(f64),
            Text(String),
        }
        let items = Vec::<Item>::deserialize(deserializer)?;
        let parsed = items
            .into_iter()
            .map(|item| match item {
                Item::Text(s) => s.parse::<Exponent>(),
                // JSON numbers are read through their shortest decimal form so
                // that 1.8 is taken as 9/5.
                Item::Num(v) => v.to_string().parse::<Exponent>(),
            })
            .collect::<Result<Vec<_>>>()
            .map_err(de::Error::custom)?;
        ExponentTuple::from_exponents(parsed).map_err(de::Error::custom)
    }
}

/// A set of 0-based positions into an exponent tuple.
///
/// Displays and serializes 1-based, e.g. `{1,2}`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IndexSet(pub Vec<usize>);

impl IndexSet {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|i| i + 1).collect()
    }

    fn from_mask(mask: u64, k: usize) -> Self {
        IndexSet((0..k).filter(|&j| mask >> j & 1 == 1).collect())
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl Serialize for IndexSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.one_based().serialize(serializer)
    }
}

/// Outcome of an admissibility check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    /// Subset with the largest positive deficit; empty when admissible.
    pub witness: IndexSet,
    /// Largest deficit over all nonempty subsets.
    pub max_deficit: f64,
    /// `sum_j 1/min(q_j, 2)`.
    pub reduced_sum: f64,
    /// A nonempty subset attaining `max_deficit`, reported whatever the verdict.
    pub maximizer: IndexSet,
}

fn check_subset(subset: &[usize], k: usize) -> Result<()> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    for (pos, &i) in subset.iter().enumerate() {
        if i >= k {
            return Err(Error::IndexOutOfRange { index: i, len: k });
        }
        if subset[..pos].contains(&i) {
            return Err(Error::Invalid(format!(
                "index {} repeated in subset",
                i + 1
            )));
        }
    }
    Ok(())
}

/// `sum_{j in A} 1/q_j - (|A| + 1)/2` for a nonempty subset `A` of 0-based indices.
pub fn deficit(q: &ExponentTuple, subset: &[usize]) -> Result<f64> {
    check_subset(subset, q.len())?;
    let sum: f64 = subset.iter().map(|&j| 1.0 / q.values[j]).sum();
    Ok(sum - (subset.len() as f64 + 1.0) / 2.0)
}

/// Exact deficit; `None` when the tuple has no exact representation.
pub fn deficit_exact(q: &ExponentTuple, subset: &[usize]) -> Result<Option<BigRational>> {
    check_subset(subset, q.len())?;
    Ok(q.exact.as_ref().map(|ex| exact_deficit(ex, subset)))
}

fn exact_deficit(ex: &[BigRational], subset: &[usize]) -> BigRational {
    let mut sum = BigRational::zero();
    for &j in subset {
        sum += ex[j].recip();
    }
    sum - BigRational::new(BigInt::from(subset.len() + 1), BigInt::from(2))
}

/// Enumerates every nonempty subset and reports the worst one.
///
/// Ties between subsets of equal deficit go to the smaller subset, and
/// indices with `q_j = 2` (which contribute nothing) are dropped from the
/// reported subset unless nothing else remains.
pub fn is_admissible_bruteforce(q: &ExponentTuple) -> Result<AdmissibilityReport> {
    let k = q.len();
    if k > MAX_BRUTE_K {
        return Err(Error::Capacity {
            what: "subset enumeration length",
            required: k as u128,
            budget: MAX_BRUTE_K as u128,
        });
    }
    let recips: Vec<f64> = q.values.iter().map(|v| 1.0 / v).collect();

    // Subset sums as low-half + high-half table lookups: every sum is formed
    // from at most k additions, with O(2^(k/2)) memory.
    let low_bits = k / 2;
    let high_bits = k - low_bits;
    let low = subset_sums(&recips[..low_bits]);
    let high = subset_sums(&recips[low_bits..]);
    let low_mask = (1u64 << low_bits) - 1;

    let mut best = f64::NEG_INFINITY;
    let mut best_mask = 0u64;
    for mask in 1u64..(1u64 << k) {
        let sum = low[(mask & low_mask) as usize] + high[(mask >> low_bits) as usize];
        let card = mask.count_ones();
        let d = sum - (card as f64 + 1.0) / 2.0;
        if d > best || (d == best && card < best_mask.count_ones()) {
            best = d;
            best_mask = mask;
        }
    }
    debug_assert!(high.len() == 1 << high_bits);

    let twos = (0..k)
        .filter(|&j| q.values[j] == 2.0)
        .fold(0u64, |m, j| m | (1 << j));
    if best_mask & !twos != 0 {
        best_mask &= !twos;
    }
    let maximizer = IndexSet::from_mask(best_mask, k);
    let admissible = best <= BOUNDARY_TOL;
    Ok(AdmissibilityReport {
        admissible,
        witness: if admissible {
            IndexSet::default()
        } else {
            maximizer.clone()
        },
        max_deficit: best,
        reduced_sum: reduced_sum(q),
        maximizer,
    })
}

fn subset_sums(weights: &[f64]) -> Vec<f64> {
    let mut sums = vec![0.0; 1 << weights.len()];
    for mask in 1usize..sums.len() {
        let low = mask.trailing_zeros() as usize;
        sums[mask] = sums[mask & (mask - 1)] + weights[low];
    }
    sums
}

fn reduced_sum(q: &ExponentTuple) -> f64 {
    q.values.iter().map(|&v| 1.0 / v.min(2.0)).sum()
}

/// Linear-time admissibility check through the `min(q, 2)` reduction.
///
/// Agrees with [`is_admissible_bruteforce`] on verdict and `max_deficit`.
pub fn is_admissible_fast(q: &ExponentTuple) -> AdmissibilityReport {
    let below_two: Vec<usize> = (0..q.len()).filter(|&j| q.values[j] < 2.0).collect();
    let maximizer = if below_two.is_empty() {
        let argmin = (0..q.len())
            .min_by(|&a, &b| q.values[a].total_cmp(&q.values[b]))
            .expect("nonempty tuple");
        vec![argmin]
    } else {
        below_two
    };
    let max_deficit = deficit(q, &maximizer).expect("valid subset");
    let maximizer = IndexSet(maximizer);
    let admissible = max_deficit <= BOUNDARY_TOL;
    AdmissibilityReport {
        admissible,
        witness: if admissible {
            IndexSet::default()
        } else {
            maximizer.clone()
        },
        max_deficit,
        reduced_sum: reduced_sum(q),
        maximizer,
    }
}

/// Admissibility decided in exact rational arithmetic.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactAdmissibility {
    pub admissible: bool,
    pub witness: IndexSet,
    pub max_deficit: BigRational,
    pub maximizer: IndexSet,
    /// `sum_j 1/min(q_j, 2)`.
    pub reduced_sum: BigRational,
    /// `sum_j 1/q_j` over the full index set.
    pub full_sum: BigRational,
    /// `(k + 1)/2`.
    pub full_bound: BigRational,
}

/// Exact version of [`is_admissible_fast`]; `None` without an exact representation.
pub fn is_admissible_exact(q: &ExponentTuple) -> Option<ExactAdmissibility> {
    let ex = q.exact.as_ref()?;
    let two = BigRational::from_integer(BigInt::from(2));
    let below_two: Vec<usize> = (0..ex.len()).filter(|&j| ex[j] < two).collect();
    let maximizer = if below_two.is_empty() {
        let argmin = (0..ex.len()).min_by(|&a, &b| ex[a].cmp(&ex[b]))?;
        vec![argmin]
    } else {
        below_two
    };
    let max_deficit = exact_deficit(ex, &maximizer);
    let admissible = !max_deficit.is_positive();
    let maximizer = IndexSet(maximizer);
    let reduced_sum = ex
        .iter()
        .map(|r| if *r < two { r.recip() } else { two.recip() })
        .fold(BigRational::zero(), |acc, x| acc + x);
    let full_sum = ex
        .iter()
        .map(|r| r.recip())
        .fold(BigRational::zero(), |acc, x| acc + x);
    Some(ExactAdmissibility {
        admissible,
        witness: if admissible {
            IndexSet::default()
        } else {
            maximizer.clone()
        },
        max_deficit,
        maximizer,
        reduced_sum,
        full_sum,
        full_bound: BigRational::new(BigInt::from(ex.len() + 1), BigInt::from(2)),
    })
}

/// Componentwise `min(q_j, 2)`.
pub fn reduce_min2(q: &ExponentTuple) -> ExponentTuple {
    let two = BigRational::from_integer(BigInt::from(2));
    ExponentTuple {
        values: q.values.iter().map(|v| v.min(2.0)).collect(),
        exact: q.exact.as_ref().map(|ex| {
            ex.iter()
                .map(|r| if *r < two { r.clone() } else { two.clone() })
                .collect()
        }),
    }
}

/// `m` copies of the classical exponent `2m/(m+1)`.
pub fn classical_bh_tuple(m: usize) -> Result<ExponentTuple> {
    if m == 0 {
        return Err(Error::Invalid("arity must be at least 1".into()));
    }
    let q = BigRational::new(BigInt::from(2 * m), BigInt::from(m + 1));
    ExponentTuple::from_rationals(vec![q; m])
}
