//! Deterministic generators for test corpora: random valid modules
//! (built as `U * diag(u^a_i) * V` with unit transforms, so the divisor
//! exponents are prescribed) and exhaustive sequence enumeration.

use alloc::sync::Arc;
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::field::{FFElt, FinField};
use crate::matrix::SeriesMatrix;
use crate::module::{Height, PhiModule};
use crate::series::USeries;
use crate::simple::SimpleSeq;

fn rand_below(rng: &mut impl RngCore, n: u64) -> u64 {
    rng.next_u64() % n.max(1)
}

fn rand_elt(rng: &mut impl RngCore, field: &Arc<FinField>) -> FFElt {
    FFElt(rand_below(rng, field.q() as u64) as u32)
}

fn rand_unit_elt(rng: &mut impl RngCore, field: &Arc<FinField>) -> FFElt {
    FFElt(1 + rand_below(rng, field.q() as u64 - 1) as u32)
}

fn rand_poly(rng: &mut impl RngCore, field: &Arc<FinField>, maxdeg: i64) -> USeries {
    let mut s = USeries::zero(field.clone());
    for n in 0..=maxdeg {
        let c = rand_elt(rng, field);
        if !c.is_zero() {
            s = s.add(&USeries::monomial(field.clone(), c, n)).expect("same field");
        }
    }
    s
}

/// Random invertible matrix over `k[[u]]`: unit lower times unit upper
/// triangular with polynomial entries, composed with a random permutation.
fn rand_unit_matrix(rng: &mut impl RngCore, field: &Arc<FinField>, d: usize, maxdeg: i64) -> SeriesMatrix {
    let lower = SeriesMatrix::from_fn(field.clone(), d, d, |i, j| {
        if i == j {
            USeries::monomial(field.clone(), rand_unit_elt(rng, field), 0)
        } else if i > j {
            rand_poly(rng, field, maxdeg)
        } else {
            USeries::zero(field.clone())
        }
    });
    let upper = SeriesMatrix::from_fn(field.clone(), d, d, |i, j| {
        if i == j {
            USeries::one(field.clone())
        } else if i < j {
            rand_poly(rng, field, maxdeg)
        } else {
            USeries::zero(field.clone())
        }
    });
    // random permutation of the rows
    let mut perm: Vec<usize> = (0..d).collect();
    for i in (1..d).rev() {
        let j = rand_below(rng, (i + 1) as u64) as usize;
        perm.swap(i, j);
    }
    let permuted = SeriesMatrix::from_fn(field.clone(), d, d, |i, j| lower.at(perm[i], j).clone());
    permuted.mul(&upper).expect("square")
}

/// A random valid module of the given rank: divisor exponents are drawn
/// uniformly from `[0, er]`, so the height bound holds by construction.
pub fn random_module(
    rng: &mut impl RngCore,
    field: &Arc<FinField>,
    e: u32,
    r: u32,
    d: usize,
    maxdeg: i64,
) -> PhiModule {
    let er = e as i64 * r as i64;
    let exps: Vec<i64> = (0..d).map(|_| rand_below(rng, (er + 1) as u64) as i64).collect();
    let diag = SeriesMatrix::diag_monomials(field.clone(), &exps);
    let left = rand_unit_matrix(rng, field, d, maxdeg);
    let right = rand_unit_matrix(rng, field, d, maxdeg);
    let frob = left.mul(&diag).expect("square").mul(&right).expect("square");
    let m = PhiModule::new_unchecked(field.clone(), e, Height::Finite(r), frob).expect("shape");
    debug_assert!(m.validate().expect("decidable").passed());
    m
}

/// All sequences with values in `[0, er]`, minimal period exactly `len`,
/// for every `len <= dmax`.  Set `only_in_s` to keep the class S.
pub fn all_sequences(p: u32, f: u32, e: u32, r: u32, dmax: usize, only_in_s: bool) -> Vec<SimpleSeq> {
    let er = (e as i64 * r as i64) as u32;
    let mut out = Vec::new();
    for len in 1..=dmax {
        let mut digits = alloc::vec![0u32; len];
        loop {
            let seq = SimpleSeq::new(p, f, e, Height::Finite(r), &digits).expect("bounded");
            if seq.d() == len && (!only_in_s || seq.in_s()) {
                out.push(seq);
            }
            let mut idx = 0;
            loop {
                if idx == len {
                    break;
                }
                digits[idx] += 1;
                if digits[idx] <= er {
                    break;
                }
                digits[idx] = 0;
                idx += 1;
            }
            if idx == len {
                break;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_core::SeedableRng;

    #[test]
    fn random_modules_validate() {
        let field = FinField::prime(3).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let m = random_module(&mut rng, &field, 1, 2, 2, 1);
            assert!(m.validate().unwrap().passed());
            let divs = m.divisors().unwrap();
            assert!(divs.iter().all(|&a| (0..=2).contains(&a)));
        }
    }

    #[test]
    fn sequence_enumeration_counts() {
        // p=2, e=1, r=1: values in {0,1}: two period-1 sequences and two
        // period-2 ones ((0,1) and (1,0))
        let seqs = all_sequences(2, 1, 1, 1, 2, false);
        assert_eq!(seqs.len(), 4);
        let in_s = all_sequences(2, 1, 1, 1, 2, true);
        // (0,1) and (1,0) have s = (1,2) mod 3: distinct, so all four are in S
        assert_eq!(in_s.len(), 4);
    }
}
