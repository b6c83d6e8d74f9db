//! Bounded searches built on the closed forms.
//!
//! * self-power hits: orders m for which the product of fields of those
//!   orders satisfies S_m(R) = +1 or -1;
//! * generalized Giuga candidates: composite shapes m with S_{m-1}(R) = -1
//!   over a product of at least two fields;
//! * the discrepancy scan: sweeps whole families comparing the literal
//!   printed tables, the composed engine, and the brute-force oracle.
//!
//! Both integer searches factor every order in a range with a segmented
//! sieve and fan the segments out across threads; segments are merged back
//! in ascending order so the output is deterministic.

use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::{AlgebraError, Element};
use crate::closedform::{
    evaluate, powersum_spec, powersum_spec_table, PowerSumError, SymbolicValue,
};
use crate::constructors::{realize, RealizeError, RingSpec};
use crate::numtheory::{factorize, NumTheoryError};
use crate::oracle::brute_power_sum;
use crate::poly::Poly;

/// Hard cap on sieve searches; beyond this the per-run memory and time stop
/// being interactive.
pub const MAX_SEARCH_BOUND: u64 = 200_000_000;

const SEGMENT: u64 = 1 << 16;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("search bound {max} exceeds the supported limit {limit}")]
    BoundTooLarge { max: u64, limit: u64 },
    #[error("target must be +1 or -1")]
    BadTarget,
    #[error("composed engine disagrees with the oracle on {spec} at k={k}; this is a bug")]
    EngineMismatch { spec: String, k: u64 },
    #[error(transparent)]
    PowerSum(#[from] PowerSumError),
    #[error(transparent)]
    Realize(#[from] RealizeError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    NumTheory(#[from] NumTheoryError),
}

// ---------------------------------------------------------------------------
// Self-power hits: S_m(R) = +/-1 over a product of fields of total order m
// ---------------------------------------------------------------------------

/// Per-prime facts behind a hit: both conditions are re-checkable from m.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelfPowerWitness {
    pub p: u64,
    pub e: u32,
    /// q = p^e, the field size used at this prime.
    pub q: u64,
    /// q - 1 divides m.
    pub divisor_ok: bool,
    /// m mod p^{e+1}.
    pub residue: u64,
    /// The residue a hit requires: p^{e+1} - p^e for +1, p^e for -1.
    pub required: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelfPowerHit {
    pub m: u64,
    /// +1 or -1.
    pub target: i8,
    /// Field sizes q_i = p_i^{e_i}, ascending by prime.
    pub field_sizes: Vec<u64>,
    /// m = 1 is the empty product (the zero ring), where S_1 = 0 = 1.
    pub degenerate: bool,
    pub witnesses: Vec<SelfPowerWitness>,
}

fn self_power_witness(m: u64, p: u64, e: u32, target: i8) -> SelfPowerWitness {
    let q = p.pow(e);
    let pe1 = (q as u128) * (p as u128);
    let residue = ((m as u128) % pe1) as u64;
    let required = if target == 1 { (pe1 - q as u128) as u64 } else { q };
    SelfPowerWitness {
        p,
        e,
        q,
        divisor_ok: m % (q - 1).max(1) == 0,
        residue,
        required,
    }
}

fn check_with_factors(m: u64, factors: &[(u64, u32)], target: i8) -> Option<SelfPowerHit> {
    if m == 1 {
        return Some(SelfPowerHit {
            m: 1,
            target,
            field_sizes: Vec::new(),
            degenerate: true,
            witnesses: Vec::new(),
        });
    }
    let mut witnesses = Vec::with_capacity(factors.len());
    for &(p, e) in factors {
        let w = self_power_witness(m, p, e, target);
        if !w.divisor_ok || w.residue != w.required {
            return None;
        }
        witnesses.push(w);
    }
    Some(SelfPowerHit {
        m,
        target,
        field_sizes: witnesses.iter().map(|w| w.q).collect(),
        degenerate: false,
        witnesses,
    })
}

/// Is m a self-power order for the given target (+1 or -1)? The ring in
/// question is the product of the fields of size p^e over the exact prime
/// powers of m; the hit conditions say exactly that S_m of that ring is the
/// image of the target.
pub fn check_self_power(m: u64, target: i8) -> Result<Option<SelfPowerHit>, SearchError> {
    if target != 1 && target != -1 {
        return Err(SearchError::BadTarget);
    }
    if m == 0 {
        return Ok(None);
    }
    let f = factorize(m)?;
    Ok(check_with_factors(m, &f.factors, target))
}

/// All self-power orders up to `max`, ascending. Segmented sieve, one rayon
/// task per segment, merged in segment order.
pub fn search_self_power(target: i8, max: u64) -> Result<Vec<SelfPowerHit>, SearchError> {
    if target != 1 && target != -1 {
        return Err(SearchError::BadTarget);
    }
    sieve_search(max, |m, factors| check_with_factors(m, factors, target))
}

// ---------------------------------------------------------------------------
// Generalized Giuga candidates: S_{m-1}(R) = -1 over >= 2 fields
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GiugaVerdict {
    /// m is a single prime power, so R is one field and S_{m-1} = -1 holds
    /// for free; not a counterexample shape.
    FieldTrivial { q: u64 },
    /// Every condition holds across >= 2 prime-power parts. Finding one of
    /// these below a searched bound would be news.
    Candidate { m: u64, field_sizes: Vec<u64> },
    /// Some condition fails; the first failure (smallest prime, divisor
    /// condition before residue condition) is reported.
    Rejected {
        m: u64,
        p: u64,
        e: u32,
        /// "ii" = q-1 must divide m-1; "iii" = m must be p^e mod p^{e+1}.
        condition: &'static str,
        observed: u64,
        required: u64,
    },
}

fn giuga_with_factors(m: u64, factors: &[(u64, u32)]) -> GiugaVerdict {
    if factors.len() == 1 {
        let (p, e) = factors[0];
        return GiugaVerdict::FieldTrivial { q: p.pow(e) };
    }
    for &(p, e) in factors {
        let q = p.pow(e);
        if (m - 1) % (q - 1) != 0 {
            return GiugaVerdict::Rejected {
                m,
                p,
                e,
                condition: "ii",
                observed: (m - 1) % (q - 1),
                required: 0,
            };
        }
        let pe1 = (q as u128) * (p as u128);
        let residue = ((m as u128) % pe1) as u64;
        if residue != q {
            return GiugaVerdict::Rejected {
                m,
                p,
                e,
                condition: "iii",
                observed: residue,
                required: q,
            };
        }
    }
    GiugaVerdict::Candidate { m, field_sizes: factors.iter().map(|&(p, e)| p.pow(e)).collect() }
}

/// Full verdict for one order m >= 2.
pub fn check_giuga_order(m: u64) -> Result<GiugaVerdict, SearchError> {
    let f = factorize(m)?;
    Ok(giuga_with_factors(m, &f.factors))
}

/// Every Candidate verdict with 2 <= m <= max, ascending (expected: none for
/// any bound that has ever been searched).
pub fn search_giuga(max: u64) -> Result<Vec<GiugaVerdict>, SearchError> {
    sieve_search(max, |m, factors| {
        if m < 2 {
            return None;
        }
        match giuga_with_factors(m, factors) {
            v @ GiugaVerdict::Candidate { .. } => Some(v),
            _ => None,
        }
    })
}

// ---------------------------------------------------------------------------
// Segmented sieve driver
// ---------------------------------------------------------------------------

/// Runs `test` on every m in [1, max] with m's exact prime factorization,
/// collecting the Some results in ascending m order. Factorizations come
/// from a segmented sieve over the base primes <= sqrt(max).
fn sieve_search<T, F>(max: u64, test: F) -> Result<Vec<T>, SearchError>
where
    T: Send,
    F: Fn(u64, &[(u64, u32)]) -> Option<T> + Sync,
{
    if max > MAX_SEARCH_BOUND {
        return Err(SearchError::BoundTooLarge { max, limit: MAX_SEARCH_BOUND });
    }
    if max == 0 {
        return Ok(Vec::new());
    }
    let base = base_primes((max as f64).sqrt() as u64 + 1);
    let segments: Vec<(u64, u64)> = (1..=max)
        .step_by(SEGMENT as usize)
        .map(|lo| (lo, (lo + SEGMENT - 1).min(max)))
        .collect();
    let nested: Vec<Vec<T>> = segments
        .par_iter()
        .map(|&(lo, hi)| {
            let len = (hi - lo + 1) as usize;
            let mut residual: Vec<u64> = (lo..=hi).collect();
            let mut factors: Vec<Vec<(u64, u32)>> = vec![Vec::new(); len];
            for &p in &base {
                if p * p > hi {
                    break;
                }
                let mut idx = (lo.next_multiple_of(p) - lo) as usize;
                while idx < len {
                    let mut e = 0u32;
                    while residual[idx] % p == 0 {
                        residual[idx] /= p;
                        e += 1;
                    }
                    factors[idx].push((p, e));
                    idx += p as usize;
                }
            }
            let mut out = Vec::new();
            for (i, f) in factors.iter_mut().enumerate() {
                let m = lo + i as u64;
                if residual[i] > 1 {
                    f.push((residual[i], 1));
                }
                if let Some(hit) = test(m, f) {
                    out.push(hit);
                }
            }
            out
        })
        .collect();
    Ok(nested.into_iter().flatten().collect())
}

fn base_primes(limit: u64) -> Vec<u64> {
    let n = limit.max(2) as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut p = 2usize;
    while p * p <= n {
        if sieve[p] {
            let mut q = p * p;
            while q <= n {
                sieve[q] = false;
                q += p;
            }
        }
        p += 1;
    }
    (2..=n).filter(|&i| sieve[i]).map(|i| i as u64).collect()
}

// ---------------------------------------------------------------------------
// Discrepancy scan: printed tables vs composed engine vs oracle
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanFamily {
    ZMod,
    Gaussian,
    Quadratic,
    PolyQuot,
    Matrix,
}

impl ScanFamily {
    pub const ALL: [ScanFamily; 5] = [
        ScanFamily::ZMod,
        ScanFamily::Gaussian,
        ScanFamily::Quadratic,
        ScanFamily::PolyQuot,
        ScanFamily::Matrix,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScanFamily::ZMod => "zmod",
            ScanFamily::Gaussian => "gaussian",
            ScanFamily::Quadratic => "quadratic",
            ScanFamily::PolyQuot => "polyquot",
            ScanFamily::Matrix => "matrix",
        }
    }

    pub fn from_name(name: &str) -> Option<ScanFamily> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Family sweep bounds. `n_max` caps the modulus (the matrix family reads
/// it as the largest base-field size); `k_values` is the exponent list,
/// which the matrix family additionally caps per field size to keep the
/// larger base fields cheap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanBounds {
    pub n_max: u64,
    pub k_values: Vec<u64>,
}

impl ScanBounds {
    pub fn default_for(family: ScanFamily) -> ScanBounds {
        match family {
            ScanFamily::ZMod => ScanBounds { n_max: 16, k_values: (1..=9).collect() },
            ScanFamily::Gaussian => ScanBounds { n_max: 12, k_values: (1..=9).collect() },
            ScanFamily::Quadratic => {
                let mut ks: Vec<u64> = (1..=12).collect();
                ks.extend([24, 80]);
                ScanBounds { n_max: 10, k_values: ks }
            }
            ScanFamily::PolyQuot => {
                let mut ks: Vec<u64> = (1..=12).collect();
                ks.push(26);
                ScanBounds { n_max: 6, k_values: ks }
            }
            ScanFamily::Matrix => ScanBounds { n_max: 5, k_values: (1..=30).collect() },
        }
    }
}

/// One case where the literal printed table and the composed engine land on
/// different ring elements. The composed value always equals the oracle —
/// a composed/oracle mismatch aborts the scan instead of becoming a row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscrepancyRow {
    pub family: &'static str,
    pub spec: String,
    pub k: u64,
    pub table: SymbolicValue,
    pub composed: SymbolicValue,
    pub table_element: Element,
    pub oracle_element: Element,
}

fn family_specs(family: ScanFamily, bounds: &ScanBounds) -> Vec<RingSpec> {
    let mut specs = Vec::new();
    match family {
        ScanFamily::ZMod => {
            for n in 1..=bounds.n_max {
                specs.push(RingSpec::ZMod(n));
            }
        }
        ScanFamily::Gaussian => {
            for n in 2..=bounds.n_max {
                specs.push(RingSpec::Gaussian(n));
            }
        }
        ScanFamily::Quadratic => {
            for n in 2..=bounds.n_max {
                for b in 0..n {
                    for c in 0..n {
                        specs.push(RingSpec::Quadratic { n, b: b as i64, c: c as i64 });
                    }
                }
            }
        }
        ScanFamily::PolyQuot => {
            for n in 2..=bounds.n_max {
                for code in 0..n * n * n {
                    let c0 = code % n;
                    let c1 = (code / n) % n;
                    let c2 = code / (n * n);
                    let f = Poly::new(n, [c0 as i64, c1 as i64, c2 as i64, 1]);
                    specs.push(RingSpec::PolyQuot { n, f });
                }
            }
        }
        ScanFamily::Matrix => {
            for q in 2..=bounds.n_max {
                if let Ok(f) = factorize(q) {
                    if f.is_prime_power() {
                        let (p, s) = f.factors[0];
                        specs.push(RingSpec::Matrix {
                            d: 2,
                            inner: Box::new(RingSpec::GaloisField { p, s }),
                        });
                    }
                }
            }
        }
    }
    specs
}

fn matrix_k_cap(q: u64) -> u64 {
    match q {
        2 => 30,
        3 => 20,
        _ => 12,
    }
}

/// Sweeps one family, comparing table vs composed vs oracle on every case.
/// Returns the rows where the printed table disagrees with the composed
/// engine (as evaluated elements); errors out if the composed engine ever
/// disagrees with the oracle.
pub fn discrepancy_scan(
    family: ScanFamily,
    bounds: &ScanBounds,
    max_elements: u64,
) -> Result<Vec<DiscrepancyRow>, SearchError> {
    let mut rows = Vec::new();
    for spec in family_specs(family, bounds) {
        let a = realize(&spec)?;
        let spec_text = spec.to_string();
        for &k in &bounds.k_values {
            if let ScanFamily::Matrix = family {
                if let RingSpec::Matrix { inner, .. } = &spec {
                    if let RingSpec::GaloisField { p, s } = **inner {
                        if k > matrix_k_cap(p.pow(s)) {
                            continue;
                        }
                    }
                }
            }
            let composed = powersum_spec(&spec, k)?;
            let table = powersum_spec_table(&spec, k)?;
            let composed_element = evaluate(&composed.value, &a, max_elements)?;
            let oracle_element = brute_power_sum(&a, k, max_elements)?;
            if composed_element != oracle_element {
                return Err(SearchError::EngineMismatch { spec: spec_text, k });
            }
            let table_element = evaluate(&table.value, &a, max_elements)?;
            if table_element != composed_element {
                rows.push(DiscrepancyRow {
                    family: family.name(),
                    spec: spec_text.clone(),
                    k,
                    table,
                    composed,
                    table_element,
                    oracle_element,
                });
            }
        }
    }
    Ok(rows)
}
