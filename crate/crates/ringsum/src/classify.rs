//! Structure recognition for realized algebras.
//!
//! Everything here leans on one dichotomy: over a ring of prime-power order
//! q, the sum of the (q-1)-st powers of all elements is -1 exactly when the
//! ring is a field, and is something visibly different otherwise. That turns
//! "is this quotient a field?" — and with it polynomial irreducibility and
//! ideal maximality — into a single brute-force power sum.

use thiserror::Error;

use crate::algebra::{AlgebraError, FiniteAlgebra};
use crate::closedform::{ComponentClass, PowerSumError};
use crate::constructors::{realize, RealizeError, RingSpec};
use crate::numtheory::{factorize, is_prime, NumTheoryError};
use crate::oracle::brute_power_sum;
use crate::poly::Poly;

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("order {0} is not a prime power >= 2")]
    NotPrimePower(u128),
    #[error(transparent)]
    Realize(#[from] RealizeError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    NumTheory(#[from] NumTheoryError),
    #[error(transparent)]
    PowerSum(#[from] PowerSumError),
}

fn prime_power_order(a: &FiniteAlgebra, max_elements: u64) -> Result<(u64, u64, u32), ClassifyError> {
    let n = a.enumerable_order(max_elements)?;
    if n < 2 {
        return Err(ClassifyError::NotPrimePower(n as u128));
    }
    let f = factorize(n)?;
    if !f.is_prime_power() {
        return Err(ClassifyError::NotPrimePower(n as u128));
    }
    let (p, t) = f.factors[0];
    Ok((n, p, t))
}

/// Sorts an algebra of prime-power order into the classes power sums care
/// about: a field, a cyclic ring Z/p^t, the square-zero four-element ring,
/// or none of those (which never contributes to a power sum).
pub fn classify_prime_power_algebra(
    a: &FiniteAlgebra,
    max_elements: u64,
) -> Result<ComponentClass, ClassifyError> {
    let (n, p, t) = prime_power_order(a, max_elements)?;
    if all_nonzero_invertible(a, n) {
        return Ok(ComponentClass::Field { p, s: t });
    }
    if a.characteristic() == n as u128 {
        return Ok(ComponentClass::ZModPrimePower { p, s: t });
    }
    if n == 4 && a.characteristic() == 2 && count_square_zero(a, n) == 1 {
        return Ok(ComponentClass::F2X2);
    }
    Ok(ComponentClass::OtherPrimePower { p, t, cyclic: false })
}

fn all_nonzero_invertible(a: &FiniteAlgebra, n: u64) -> bool {
    let one = a.one();
    let zero = a.zero();
    for i in 0..n {
        let x = a.element_at(i);
        if x == zero {
            continue;
        }
        let mut invertible = false;
        for j in 0..n {
            let y = a.element_at(j);
            if a.mul(&x, &y) == one && a.mul(&y, &x) == one {
                invertible = true;
                break;
            }
        }
        if !invertible {
            return false;
        }
    }
    true
}

fn count_square_zero(a: &FiniteAlgebra, n: u64) -> usize {
    let zero = a.zero();
    (0..n)
        .map(|i| a.element_at(i))
        .filter(|x| *x != zero && a.mul(x, x) == zero)
        .count()
}

/// Field test by power sum: over prime-power order q >= 2, the ring is a
/// field exactly when the sum of all (q-1)-st powers is the image of -1.
pub fn is_field_via_powersum(a: &FiniteAlgebra, max_elements: u64) -> Result<bool, ClassifyError> {
    let (n, _, _) = prime_power_order(a, max_elements)?;
    let sum = brute_power_sum(a, n - 1, max_elements)?;
    Ok(sum == a.embed_integer(-1))
}

/// Irreducibility of a monic polynomial mod a prime, decided by realizing
/// the quotient ring and applying the power-sum field test. Agrees with
/// trial division by construction, and the tests check that exhaustively.
pub fn poly_irreducible_mod_p(
    p: u64,
    f: &Poly,
    max_elements: u64,
) -> Result<bool, ClassifyError> {
    if !is_prime(p) {
        return Err(ClassifyError::NotPrime(p));
    }
    let a = realize(&RingSpec::PolyQuot { n: p, f: f.reduced(p) })?;
    is_field_via_powersum(&a, max_elements)
}

/// Outcome of the maximality test, with the raw power-sum coordinates (in
/// basis order) kept for display: the ideal is maximal exactly when those
/// coordinates spell out -1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaximalityReport {
    pub maximal: bool,
    /// |A| = p^m for the quotient A.
    pub order: u64,
    /// The tested exponent, |A| - 1.
    pub exponent: u64,
    /// Coordinates of the power sum, in the algebra's basis order.
    pub coords: Vec<u64>,
    /// Basis labels matching `coords`.
    pub labels: Vec<String>,
}

/// Decides whether the defining ideal of a realized quotient is maximal:
/// realize, compute the power sum at exponent |A| - 1, and compare with the
/// image of -1. Works for any realizable spec of prime-power order; the
/// intended use is generators-and-relations quotients.
pub fn ideal_maximality(spec: &RingSpec, max_elements: u64) -> Result<MaximalityReport, ClassifyError> {
    let a = realize(spec)?;
    let (n, _, _) = prime_power_order(&a, max_elements)?;
    let sum = brute_power_sum(&a, n - 1, max_elements)?;
    let maximal = sum == a.embed_integer(-1);
    Ok(MaximalityReport {
        maximal,
        order: n,
        exponent: n - 1,
        coords: sum.coords.clone(),
        labels: a.labels().to_vec(),
    })
}

/// Symbolic unit test: S_k(R) is a unit exactly when every component of the
/// decomposition is a field of a distinct characteristic and each q_i - 1
/// divides k. Purely symbolic — nothing is realized.
pub fn unit_criterion(spec: &RingSpec, k: u64) -> Result<bool, ClassifyError> {
    let comps = crate::closedform::decompose_spec(spec)?;
    if comps.is_empty() {
        return Ok(false);
    }
    // distinct characteristics come free: the decomposition has one entry
    // per prime, and any same-prime collision is classed as OtherPrimePower
    for comp in &comps {
        match comp.class {
            ComponentClass::Field { p, s } => {
                let mut q: u128 = 1;
                for _ in 0..s {
                    q = q.checked_mul(p as u128).ok_or(PowerSumError::Overflow)?;
                }
                if (k as u128) % (q - 1) != 0 {
                    return Ok(false);
                }
            }
            _ => return Ok(false),
        }
    }
    Ok(true)
}
