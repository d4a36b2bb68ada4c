//! Random-sign forms and the coordinate-padding lift.
//!
//! Rademacher tensors have operator norm of order `n^((k+1)/2)` with high
//! probability while every coefficient has modulus one. Lifting a `k`-linear
//! form to arity `m` by multiplying with the first coordinates of the extra
//! arguments keeps both its operator norm and its mixed norms.

use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{entry_count, CoefTensor, Entries, ScalarField, DEFAULT_ENTRY_BUDGET};

const FILL_BLOCK: usize = 1 << 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KszSpec {
    pub k: usize,
    pub n: usize,
    pub seed: u64,
    pub field: ScalarField,
}

impl KszSpec {
    pub fn new(k: usize, n: usize, seed: u64) -> Self {
        KszSpec {
            k,
            n,
            seed,
            field: ScalarField::Real,
        }
    }
}

/// Dense `k`-tensor of independent uniform signs.
///
/// Entry `i` takes the low bit of word `i` of a ChaCha8 stream keyed by the
/// seed, with the stream id derived from `(k, n)`. Blocks are filled in
/// parallel by seeking, so the tensor is a pure function of `(seed, k, n)`.
/// Complex specs get the same real signs under a complex field tag.
pub fn sample_sign_tensor(spec: &KszSpec) -> Result<CoefTensor> {
    let len = entry_count(spec.k, spec.n, DEFAULT_ENTRY_BUDGET)?;
    let stream = ((spec.k as u64) << 32) ^ spec.n as u64;
    let mut signs = vec![0.0f64; len];
    signs
        .par_chunks_mut(FILL_BLOCK)
        .enumerate()
        .for_each(|(block, out)| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(stream);
            rng.set_word_pos((block * FILL_BLOCK) as u128);
            for v in out.iter_mut() {
                *v = if rng.next_u32() & 1 == 1 { -1.0 } else { 1.0 };
            }
        });
    let entries = match spec.field {
        ScalarField::Real => Entries::Real(signs),
        ScalarField::Complex => {
            Entries::Complex(signs.into_iter().map(|s| Complex64::new(s, 0.0)).collect())
        }
    };
    CoefTensor::new(spec.k, spec.n, entries)
}

/// `T_m(x^(1), ..., x^(m)) = T_k(x^(1), ..., x^(k)) * x^(k+1)_1 * ... * x^(m)_1`.
pub fn lift(t: &CoefTensor, m: usize) -> Result<CoefTensor> {
    let k = t.arity();
    if m < k {
        return Err(Error::Invalid(format!(
            "lift target arity {m} is below the form's arity {k}"
        )));
    }
    let n = t.side();
    let len = entry_count(m, n, DEFAULT_ENTRY_BUDGET)?;
    let pad = len / t.len();
    let entries = match t.entries() {
        Entries::Real(v) => {
            let mut out = vec![0.0; len];
            for (j, &x) in v.iter().enumerate() {
                out[j * pad] = x;
            }
            Entries::Real(out)
        }
        Entries::Complex(v) => {
            let mut out = vec![Complex64::new(0.0, 0.0); len];
            for (j, &z) in v.iter().enumerate() {
                out[j * pad] = z;
            }
            Entries::Complex(out)
        }
    };
    CoefTensor::new(m, n, entries)
}

/// Sylvester-Hadamard matrix of side `n = 2^p`: the `p`-fold Kronecker power
/// of the 2x2 Littlewood sign matrix. `n = 1` gives `(1)`.
pub fn hadamard(n: usize) -> Result<CoefTensor> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::Invalid(format!(
            "Hadamard side {n} is not a power of two"
        )));
    }
    CoefTensor::from_fn(2, n, |i| {
        if (i[0] & i[1]).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::ExponentTuple;
    use crate::opnorm::exact_real;
    use crate::tensor::mixed_norm;

    #[test]
    fn signs_only() {
        for (k, n) in [(1, 7), (2, 5), (3, 4)] {
            let t = sample_sign_tensor(&KszSpec::new(k, n, 99)).unwrap();
            assert!(t
                .real_entries()
                .unwrap()
                .iter()
                .all(|&x| x == 1.0 || x == -1.0));
        }
    }

    #[test]
    fn reproducible_and_seed_dependent() {
        let a = sample_sign_tensor(&KszSpec::new(2, 40, 5)).unwrap();
        let b = sample_sign_tensor(&KszSpec::new(2, 40, 5)).unwrap();
        let c = sample_sign_tensor(&KszSpec::new(2, 40, 6)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn large_fill_matches_single_block() {
        // Several parallel blocks must read exactly the sequential stream.
        let spec = KszSpec::new(2, 200, 17);
        let t = sample_sign_tensor(&spec).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        rng.set_stream((2u64 << 32) ^ 200);
        let seq: Vec<f64> = (0..200 * 200)
            .map(|_| if rng.next_u32() & 1 == 1 { -1.0 } else { 1.0 })
            .collect();
        assert_eq!(t.real_entries().unwrap(), seq.as_slice());
    }

    #[test]
    fn roughly_balanced() {
        let t = sample_sign_tensor(&KszSpec::new(2, 100, 1)).unwrap();
        let s: f64 = t.real_entries().unwrap().iter().sum();
        assert!(s.abs() < 500.0, "sum {s}");
    }

    #[test]
    fn small_sign_tensor_mixed_norm() {
        let t = sample_sign_tensor(&KszSpec::new(2, 2, 3)).unwrap();
        let q = ExponentTuple::new(vec![1.0, 1.0]).unwrap();
        assert!((mixed_norm(&t, &q).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn complex_field_keeps_real_signs() {
        let mut spec = KszSpec::new(2, 3, 8);
        spec.field = ScalarField::Complex;
        let c = sample_sign_tensor(&spec).unwrap();
        let r = sample_sign_tensor(&KszSpec::new(2, 3, 8)).unwrap();
        assert_eq!(c.field(), ScalarField::Complex);
        assert_eq!(c.with_field(ScalarField::Real).unwrap(), r);
    }

    #[test]
    fn lift_examples() {
        let l = CoefTensor::littlewood();
        assert_eq!(lift(&l, 2).unwrap(), l);
        let l3 = lift(&l, 3).unwrap();
        let e = l3.real_entries().unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(
                    e[l3.flat_index(&[i, j, 0])],
                    l.real_entries().unwrap()[i * 2 + j]
                );
                assert_eq!(e[l3.flat_index(&[i, j, 1])], 0.0);
            }
        }
        assert_eq!(exact_real(&l3).unwrap().lower, 2.0);
        assert!(lift(&l3, 2).is_err());
    }

    #[test]
    fn hadamard_matrices() {
        assert_eq!(hadamard(2).unwrap(), CoefTensor::littlewood());
        let h = hadamard(4).unwrap();
        let e = h.real_entries().unwrap();
        for a in 0..4 {
            for b in 0..4 {
                let dot: f64 = (0..4).map(|j| e[a * 4 + j] * e[b * 4 + j]).sum();
                assert_eq!(dot, if a == b { 4.0 } else { 0.0 });
            }
        }
        assert!(hadamard(6).is_err());
    }
}
