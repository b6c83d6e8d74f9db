//! Polynomials over Z/nZ: univariate arithmetic and text syntax, plus the
//! multivariate rewrite machinery behind the two-variable quotient rings.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("polynomial must be monic over Z/{modulus}Z")]
    NotMonic { modulus: u64 },
    #[error("polynomial must have degree >= 1")]
    ZeroDegree,
    #[error("rewrite budget of {budget} steps exceeded")]
    RewriteBudget { budget: u64 },
    #[error("rule exponent must be >= 2, got {0}")]
    BadRuleExponent(u32),
}

/// Syntax error when reading polynomial text; `offset` is a byte offset into
/// the parsed fragment.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("syntax error at byte {offset}: {message}")]
pub struct PolyParseError {
    pub offset: usize,
    pub message: String,
}

/// Univariate polynomial over Z/nZ, coefficients ascending with no trailing
/// zeros (the zero polynomial is the empty list).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    pub modulus: u64,
    coeffs: Vec<u64>,
}

impl Poly {
    pub fn new(modulus: u64, coeffs: impl IntoIterator<Item = i64>) -> Self {
        assert!(modulus >= 1);
        let mut c: Vec<u64> = coeffs
            .into_iter()
            .map(|x| x.rem_euclid(modulus as i64) as u64)
            .collect();
        while c.last() == Some(&0) {
            c.pop();
        }
        Poly { modulus, coeffs: c }
    }

    pub fn zero(modulus: u64) -> Self {
        Poly { modulus, coeffs: vec![] }
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// Coefficient of x^e (zero beyond the stored degree).
    pub fn coeff(&self, e: usize) -> u64 {
        self.coeffs.get(e).copied().unwrap_or(0)
    }

    /// Degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&1)
    }

    /// Same coefficients reduced into Z/mZ.
    pub fn reduced(&self, m: u64) -> Poly {
        Poly::new(m, self.coeffs.iter().map(|&c| (c % m) as i64))
    }

    pub fn eval(&self, x: u64) -> u64 {
        let m = self.modulus;
        self.coeffs.iter().rev().fold(0u64, |acc, &c| {
            ((acc as u128 * x as u128 + c as u128) % m as u128) as u64
        })
    }

    /// Remainder of self divided by a monic divisor, over the same modulus.
    pub fn rem_by_monic(&self, g: &Poly) -> Poly {
        assert_eq!(self.modulus, g.modulus);
        assert!(g.is_monic());
        let m = self.modulus as u128;
        let dg = g.degree().expect("monic divisor has a degree");
        let mut r: Vec<u64> = self.coeffs.clone();
        while r.len() > dg {
            let lead = *r.last().unwrap();
            let top = r.len() - 1;
            r.pop();
            if lead != 0 {
                for (t, &gc) in g.coeffs[..dg].iter().enumerate() {
                    let idx = top - dg + t;
                    let sub = (lead as u128 * gc as u128) % m;
                    r[idx] = ((r[idx] as u128 + m - sub) % m) as u64;
                }
            }
        }
        Poly::new(self.modulus, r.into_iter().map(|c| c as i64))
    }
}

impl fmt::Display for Poly {
    /// Canonical text: descending exponents, unit coefficients elided,
    /// `c*x^e` term shape. Round-trips through `parse_univariate`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (e, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if wrote {
                write!(f, "+")?;
            }
            wrote = true;
            match (e, c) {
                (0, _) => write!(f, "{c}")?,
                (1, 1) => write!(f, "x")?,
                (1, _) => write!(f, "{c}*x")?,
                (_, 1) => write!(f, "x^{e}")?,
                (_, _) => write!(f, "{c}*x^{e}")?,
            }
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Monomial exponents, one entry per variable.
pub type Monomial = Vec<u32>;

/// Multivariate polynomial over Z/pZ with a fixed variable list held by the
/// caller; terms keyed by exponent vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    pub modulus: u64,
    pub terms: BTreeMap<Monomial, u64>,
}

impl MultiPoly {
    pub fn zero(modulus: u64) -> Self {
        MultiPoly { modulus, terms: BTreeMap::new() }
    }

    pub fn constant(modulus: u64, c: u64) -> Self {
        let mut p = Self::zero(modulus);
        p.add_term(vec![], c);
        p
    }

    /// Add `c * x^m`, dropping the term if it cancels. Trailing zero
    /// exponents are trimmed so each monomial has one canonical key;
    /// `vec![]` is the constant monomial.
    pub fn add_term(&mut self, mut mono: Monomial, c: u64) {
        while mono.last() == Some(&0) {
            mono.pop();
        }
        let c = c % self.modulus;
        if c == 0 && !self.terms.contains_key(&mono) {
            return;
        }
        let cur = self.terms.entry(mono.clone()).or_insert(0);
        *cur = (*cur + c) % self.modulus;
        if *cur == 0 {
            self.terms.remove(&mono);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of variables actually mentioned.
    pub fn width(&self) -> usize {
        self.terms.keys().map(|m| m.len()).max().unwrap_or(0)
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.modulus, other.modulus);
        let mut out = MultiPoly::zero(self.modulus);
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                let n = ma.len().max(mb.len());
                let mut m = vec![0u32; n];
                for (i, slot) in m.iter_mut().enumerate() {
                    *slot = ma.get(i).copied().unwrap_or(0) + mb.get(i).copied().unwrap_or(0);
                }
                out.add_term(m, ((ca as u128 * cb as u128) % self.modulus as u128) as u64);
            }
        }
        out
    }

    fn exponent(mono: &Monomial, var: usize) -> u32 {
        mono.get(var).copied().unwrap_or(0)
    }
}

/// One substitution x_v^e -> replacement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteRule {
    pub var: usize,
    pub exponent: u32,
    pub replacement: MultiPoly,
}

pub const REWRITE_BUDGET: u64 = 1_000_000;

/// Repeatedly substitutes every rule until no term carries x_v^e with
/// e >= the rule exponent for a ruled variable. Unruled variables are left
/// alone. Aborts after `budget` substitution steps.
pub fn normal_form(
    q: &MultiPoly,
    rules: &[RewriteRule],
    budget: u64,
) -> Result<MultiPoly, PolyError> {
    for r in rules {
        if r.exponent < 2 {
            return Err(PolyError::BadRuleExponent(r.exponent));
        }
    }
    let mut work = q.clone();
    let mut steps = 0u64;
    loop {
        let target = work.terms.iter().find_map(|(mono, _)| {
            rules
                .iter()
                .find(|r| MultiPoly::exponent(mono, r.var) >= r.exponent)
                .map(|r| (mono.clone(), r))
        });
        let Some((mono, rule)) = target else {
            return Ok(work);
        };
        steps += 1;
        if steps > budget {
            return Err(PolyError::RewriteBudget { budget });
        }
        let c = work.terms.remove(&mono).unwrap();
        let mut base = mono;
        if base.len() <= rule.var {
            base.resize(rule.var + 1, 0);
        }
        base[rule.var] -= rule.exponent;
        for (rm, &rc) in &rule.replacement.terms {
            let n = base.len().max(rm.len());
            let mut m = vec![0u32; n];
            for (i, slot) in m.iter_mut().enumerate() {
                *slot = base.get(i).copied().unwrap_or(0) + rm.get(i).copied().unwrap_or(0);
            }
            work.add_term(m, ((c as u128 * rc as u128) % work.modulus as u128) as u64);
        }
    }
}

/// Irreducibility over F_p by trial division: no monic factor of degree
/// 1..=deg/2 divides f. `f` must be monic of degree >= 1 with prime modulus.
pub fn is_irreducible_mod_p(f: &Poly) -> Result<bool, PolyError> {
    let d = f.degree().ok_or(PolyError::ZeroDegree)?;
    if d == 0 {
        return Err(PolyError::ZeroDegree);
    }
    if !f.is_monic() {
        return Err(PolyError::NotMonic { modulus: f.modulus });
    }
    if d == 1 {
        return Ok(true);
    }
    let p = f.modulus;
    for dg in 1..=d / 2 {
        // all monic divisor candidates of degree dg, low coefficients counting
        // up in mixed radix
        let mut c = vec![0u64; dg];
        loop {
            let g = Poly::new(
                p,
                c.iter().map(|&x| x as i64).chain(std::iter::once(1)),
            );
            if f.rem_by_monic(&g).is_zero() {
                return Ok(false);
            }
            let mut pos = 0;
            loop {
                if pos == dg {
                    break;
                }
                c[pos] += 1;
                if c[pos] < p {
                    break;
                }
                c[pos] = 0;
                pos += 1;
            }
            if pos == dg {
                break;
            }
        }
    }
    Ok(true)
}

impl Poly {
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// Reads polynomial text over the given variables: terms `c`, `v^e`, `v`,
/// `c*v^e`, or products of variable powers (`2*x^2*y`), joined by `+`/`-`;
/// a leading `-` is allowed. Coefficients reduce mod `modulus`.
pub fn parse_multivariate(
    src: &str,
    vars: &[String],
    modulus: u64,
) -> Result<MultiPoly, PolyParseError> {
    let bytes = src.as_bytes();
    let mut pos = 0usize;
    let mut out = MultiPoly::zero(modulus);
    let err = |pos: usize, message: &str| PolyParseError { offset: pos, message: message.into() };
    if bytes.is_empty() {
        return Err(err(0, "empty polynomial"));
    }
    let mut negate = false;
    if bytes[0] == b'-' {
        negate = true;
        pos = 1;
    }
    loop {
        // one term: optional coefficient, then *-joined variable powers
        let mut coeff: Option<u64> = None;
        let mut expo = vec![0u32; vars.len()];
        loop {
            if pos < bytes.len() && bytes[pos].is_ascii_digit() {
                if coeff.is_some() || expo.iter().any(|&e| e > 0) {
                    return Err(err(pos, "unexpected number"));
                }
                let start = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                let val: u64 = src[start..pos]
                    .parse()
                    .map_err(|_| err(start, "number too large"))?;
                coeff = Some(val % modulus.max(1));
            } else if pos < bytes.len() && (bytes[pos].is_ascii_alphabetic() || bytes[pos] == b'_')
            {
                let start = pos;
                while pos < bytes.len()
                    && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_')
                {
                    pos += 1;
                }
                let name = &src[start..pos];
                let Some(v) = vars.iter().position(|w| w == name) else {
                    return Err(err(start, &format!("unknown variable '{name}'")));
                };
                let mut e = 1u32;
                if pos < bytes.len() && bytes[pos] == b'^' {
                    pos += 1;
                    let estart = pos;
                    while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                        pos += 1;
                    }
                    if estart == pos {
                        return Err(err(pos, "expected exponent"));
                    }
                    e = src[estart..pos]
                        .parse()
                        .map_err(|_| err(estart, "exponent too large"))?;
                }
                expo[v] += e;
            } else {
                return Err(err(pos, "expected a coefficient or variable"));
            }
            if pos < bytes.len() && bytes[pos] == b'*' {
                pos += 1;
                continue;
            }
            break;
        }
        let mut c = coeff.unwrap_or(1) % modulus;
        if negate {
            c = (modulus - c) % modulus;
        }
        while expo.last() == Some(&0) {
            expo.pop();
        }
        out.add_term(expo, c);
        if pos == bytes.len() {
            return Ok(out);
        }
        match bytes[pos] {
            b'+' => negate = false,
            b'-' => negate = true,
            _ => return Err(err(pos, "expected '+' or '-'")),
        }
        pos += 1;
        if pos == bytes.len() {
            return Err(err(pos, "dangling sign"));
        }
    }
}

/// Univariate wrapper over `parse_multivariate` with variable `x`.
pub fn parse_univariate(src: &str, modulus: u64) -> Result<Poly, PolyParseError> {
    let mp = parse_multivariate(src, &["x".to_string()], modulus)?;
    let deg = mp
        .terms
        .keys()
        .map(|m| m.first().copied().unwrap_or(0))
        .max()
        .unwrap_or(0) as usize;
    let mut coeffs = vec![0i64; deg + 1];
    for (m, &c) in &mp.terms {
        coeffs[m.first().copied().unwrap_or(0) as usize] = c as i64;
    }
    Ok(Poly::new(modulus, coeffs))
}

/// Canonical multivariate text, ordered by (total degree, earlier variables
/// first). Round-trips through `parse_multivariate`.
pub fn print_multivariate(p: &MultiPoly, vars: &[String]) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut terms: Vec<(&Monomial, u64)> = p.terms.iter().map(|(m, &c)| (m, c)).collect();
    terms.sort_by_key(|(m, _)| monomial_sort_key(m));
    let mut out = String::new();
    for (i, (m, c)) in terms.iter().enumerate() {
        if i > 0 {
            out.push('+');
        }
        let mut factors: Vec<String> = Vec::new();
        if *c != 1 || m.iter().all(|&e| e == 0) {
            factors.push(c.to_string());
        }
        for (v, &e) in m.iter().enumerate() {
            match e {
                0 => {}
                1 => factors.push(vars[v].clone()),
                _ => factors.push(format!("{}^{}", vars[v], e)),
            }
        }
        out.push_str(&factors.join("*"));
    }
    out
}

/// Basis/display order for monomials: total degree first, then earlier
/// variables before later ones within a degree (1, x, y, xy for two
/// variables of exponent bound 2).
pub fn monomial_sort_key(m: &Monomial) -> (u32, Vec<u32>) {
    let deg = m.iter().sum();
    let rev: Vec<u32> = m.iter().rev().copied().collect();
    (deg, rev)
}
