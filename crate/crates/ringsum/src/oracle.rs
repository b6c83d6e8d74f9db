//! Ground-truth power sums by full enumeration. Everything here is
//! brute-force on purpose: results arbitrate the symbolic engine, so this
//! path must stay independent of it (and works for non-commutative algebras
//! too).

use rayon::prelude::*;

use crate::algebra::{AlgebraError, Element, FiniteAlgebra};

/// Elements per parallel work unit; small enough to balance, large enough
/// that per-chunk overhead is noise.
const CHUNK: u64 = 2048;

fn chunk_starts(n: u64) -> Vec<u64> {
    (0..n).step_by(CHUNK as usize).collect()
}

/// Exact S_k = sum of r^k over all elements, by enumeration. The chunked
/// partial sums are merged in index order, so the result is bit-identical
/// for any worker count.
pub fn brute_power_sum(
    a: &FiniteAlgebra,
    k: u64,
    max_elements: u64,
) -> Result<Element, AlgebraError> {
    assert!(k >= 1, "power sums are defined for k >= 1");
    let n = a.enumerable_order(max_elements)?;
    let partials: Vec<Element> = chunk_starts(n)
        .par_iter()
        .map(|&start| {
            let mut acc = a.zero();
            for idx in start..(start + CHUNK).min(n) {
                let e = a.element_at(idx);
                acc = a.add(&acc, &a.pow(&e, k));
            }
            acc
        })
        .collect();
    Ok(partials.iter().fold(a.zero(), |acc, p| a.add(&acc, p)))
}

/// S_1..S_k_max in one enumeration pass (each element's powers are built
/// incrementally instead of k_max separate square-and-multiply runs).
pub fn brute_power_sum_sweep(
    a: &FiniteAlgebra,
    k_max: u64,
    max_elements: u64,
) -> Result<Vec<Element>, AlgebraError> {
    assert!(k_max >= 1, "power sums are defined for k >= 1");
    let n = a.enumerable_order(max_elements)?;
    let ks = k_max as usize;
    let partials: Vec<Vec<Element>> = chunk_starts(n)
        .par_iter()
        .map(|&start| {
            let mut acc = vec![a.zero(); ks];
            for idx in start..(start + CHUNK).min(n) {
                let e = a.element_at(idx);
                let mut p = e.clone();
                acc[0] = a.add(&acc[0], &p);
                for slot in acc.iter_mut().skip(1) {
                    p = a.mul(&p, &e);
                    *slot = a.add(slot, &p);
                }
            }
            acc
        })
        .collect();
    let mut out = vec![a.zero(); ks];
    for part in &partials {
        for (slot, p) in out.iter_mut().zip(part) {
            *slot = a.add(slot, p);
        }
    }
    Ok(out)
}

/// The distinguished nilpotent: the element u with u != 0, u + u = 0 and
/// u^2 = 0, provided exactly one exists (None when there are zero or
/// several candidates).
pub fn locate_special_nilpotent(
    a: &FiniteAlgebra,
    max_elements: u64,
) -> Result<Option<Element>, AlgebraError> {
    let n = a.enumerable_order(max_elements)?;
    let zero = a.zero();
    let mut found = None;
    for idx in 0..n {
        let e = a.element_at(idx);
        if e == zero || a.add(&e, &e) != zero || a.mul(&e, &e) != zero {
            continue;
        }
        if found.is_some() {
            return Ok(None);
        }
        found = Some(e);
    }
    Ok(found)
}
