//! Integer plumbing: factorization, valuations, quadratic residues.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NumTheoryError {
    #[error("cannot factorize 0")]
    FactorizeZero,
    #[error("{0} has a prime factor too large for trial-division factorization")]
    FactorTooLarge(u64),
    #[error("quadratic residues are only defined here for odd primes, got p = {0}")]
    NotAnOddPrime(u64),
}

/// Prime factorization of `n`, factors ascending. `n = 1` has no factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub n: u64,
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// Number of distinct prime factors.
    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// True when `n` is a prime power p^s with s >= 1.
    pub fn is_prime_power(&self) -> bool {
        self.factors.len() == 1
    }
}

const TRIAL_LIMIT: u64 = 1_000_000;

/// Trial division up to 10^6, then deterministic Miller-Rabin plus perfect
/// power detection for any cofactor. Large semiprimes with two distinct
/// factors above 10^6 are rejected rather than mis-factored.
pub fn factorize(n: u64) -> Result<Factorization, NumTheoryError> {
    if n == 0 {
        return Err(NumTheoryError::FactorizeZero);
    }
    let mut rest = n;
    let mut factors = Vec::new();
    let push = |p: u64, e: u32, factors: &mut Vec<(u64, u32)>| {
        if e > 0 {
            factors.push((p, e));
        }
    };
    let mut e = 0;
    while rest % 2 == 0 {
        rest /= 2;
        e += 1;
    }
    push(2, e, &mut factors);
    let mut d = 3;
    while d <= TRIAL_LIMIT && d * d <= rest {
        let mut e = 0;
        while rest % d == 0 {
            rest /= d;
            e += 1;
        }
        push(d, e, &mut factors);
        d += 2;
    }
    if rest > 1 {
        if rest <= TRIAL_LIMIT * TRIAL_LIMIT || is_prime(rest) {
            // Either trial division ran past sqrt(rest) (so rest is prime),
            // or Miller-Rabin certified it.
            factors.push((rest, 1));
        } else if let Some((p, e)) = perfect_prime_power(rest) {
            factors.push((p, e));
        } else {
            return Err(NumTheoryError::FactorTooLarge(n));
        }
    }
    factors.sort_unstable();
    Ok(Factorization { n, factors })
}

/// Deterministic Miller-Rabin, valid for all u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..r - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn perfect_prime_power(n: u64) -> Option<(u64, u32)> {
    for e in 2..=3u32 {
        let r = (n as f64).powf(1.0 / e as f64).round() as u64;
        for cand in r.saturating_sub(1)..=r + 1 {
            if cand > 1 && cand.checked_pow(e) == Some(n) && is_prime(cand) {
                return Some((cand, e));
            }
        }
    }
    None
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// p || n: p divides n but p^2 does not.
pub fn exactly_divides(p: u64, n: u64) -> bool {
    debug_assert!(p >= 2);
    n % p == 0 && (n / p) % p != 0
}

/// Largest e with p^e | n. `valuation(0, p)` is not meaningful; callers pass n >= 1.
pub fn valuation(mut n: u64, p: u64) -> u32 {
    debug_assert!(p >= 2 && n >= 1);
    let mut e = 0;
    while n % p == 0 {
        n /= p;
        e += 1;
    }
    e
}

/// Whether `a` is a square mod the odd prime `p`. Zero counts as a residue.
/// Small p goes through an explicit square table, larger p through Euler's
/// criterion; the two agree (see tests).
pub fn is_quadratic_residue(a: i64, p: u64) -> Result<bool, NumTheoryError> {
    if p == 2 || !is_prime(p) {
        return Err(NumTheoryError::NotAnOddPrime(p));
    }
    let a = a.rem_euclid(p as i64) as u64;
    if a == 0 {
        return Ok(true);
    }
    if p <= 50 {
        Ok((1..p).any(|t| mul_mod(t, t, p) == a))
    } else {
        Ok(pow_mod(a, (p - 1) / 2, p) == 1)
    }
}

/// gcd of two non-negative integers.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm_u128(a: u128, b: u128) -> u128 {
    if a == 0 || b == 0 {
        return 0;
    }
    let g = {
        let (mut x, mut y) = (a, b);
        while y != 0 {
            let t = x % y;
            x = y;
            y = t;
        }
        x
    };
    a / g * b
}
