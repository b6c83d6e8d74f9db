//! The ring-spec language: a small AST naming the supported ring families,
//! its ASCII syntax, and realization of specs into structure-constant tables.
//!
//! Text forms (round-trip through `Display`):
//!
//! ```text
//! zmod:12            gf:2^3 (or gf:8)     gaussian:6
//! quad:10:1:1        sqrt:6:-5            polyquot:6:x^3+x+1
//! product:(gf:4)x(zmod:9)                 matrix:2:(gf:2)
//! mvq:3:x,y:x^2=2+2*y^2;y^2=1+x           noncommp3:3
//! ```

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::algebra::{direct_product, matrix_algebra, AlgebraError, FiniteAlgebra};
use crate::numtheory::{factorize, is_prime};
use crate::poly::{
    self, is_irreducible_mod_p, monomial_sort_key, normal_form, print_multivariate, Monomial,
    MultiPoly, Poly, PolyError, RewriteRule, REWRITE_BUDGET,
};

/// Hard cap on basis rank; the full m^3 structure table must stay small.
pub const MAX_GENERATORS: usize = 128;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("spec syntax error at byte {offset}: {message}")]
pub struct SpecParseError {
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RealizeError {
    #[error("ring needs {got} generators, over the cap of {max}")]
    TooManyGenerators { got: usize, max: usize },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("quotient polynomial must be monic of degree >= 1")]
    BadQuotientPoly,
    #[error("rewrite rules reference variable '{0}' with no rule of its own")]
    UnruledVariable(String),
    #[error(transparent)]
    Rewrite(#[from] PolyError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// One substitution `var^exponent = replacement` in a two-sided quotient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MvqRule {
    pub var: String,
    pub exponent: u32,
    pub replacement: MultiPoly,
}

/// Symbolic description of a finite unital ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RingSpec {
    ZMod(u64),
    GaloisField { p: u64, s: u32 },
    /// Z/nZ[i], i.e. x^2 + 1.
    Gaussian(u64),
    /// Z/nZ[x]/(x^2 + bx + c).
    Quadratic { n: u64, b: i64, c: i64 },
    /// Z/nZ[x]/(x^2 - d).
    SqrtD { n: u64, d: i64 },
    /// Z/nZ[x]/(f), f monic with integer coefficients reduced mod n.
    PolyQuot { n: u64, f: Poly },
    Product(Vec<RingSpec>),
    Matrix { d: u32, inner: Box<RingSpec> },
    /// Z/pZ[vars]/(one power rule per variable).
    MultivarQuot { p: u64, vars: Vec<String>, rules: Vec<MvqRule> },
    /// The unique non-commutative unital ring of order p^3.
    NonCommP3(u64),
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingSpec::ZMod(n) => write!(f, "zmod:{n}"),
            RingSpec::GaloisField { p, s } => write!(f, "gf:{p}^{s}"),
            RingSpec::Gaussian(n) => write!(f, "gaussian:{n}"),
            RingSpec::Quadratic { n, b, c } => write!(f, "quad:{n}:{b}:{c}"),
            RingSpec::SqrtD { n, d } => write!(f, "sqrt:{n}:{d}"),
            RingSpec::PolyQuot { n, f: poly } => write!(f, "polyquot:{n}:{poly}"),
            RingSpec::Product(parts) => {
                write!(f, "product:")?;
                for (i, part) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, "x")?;
                    }
                    write!(f, "({part})")?;
                }
                Ok(())
            }
            RingSpec::Matrix { d, inner } => write!(f, "matrix:{d}:({inner})"),
            RingSpec::MultivarQuot { p, vars, rules } => {
                write!(f, "mvq:{p}:{}", vars.join(","))?;
                for (i, r) in rules.iter().enumerate() {
                    write!(
                        f,
                        "{}{}^{}={}",
                        if i == 0 { ":" } else { ";" },
                        r.var,
                        r.exponent,
                        print_multivariate(&r.replacement, vars)
                    )?;
                }
                Ok(())
            }
            RingSpec::NonCommP3(p) => write!(f, "noncommp3:{p}"),
        }
    }
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, SpecParseError> {
        Err(SpecParseError { offset: self.pos, message: message.into() })
    }

    fn peek(&self) -> Option<u8> {
        self.src.as_bytes().get(self.pos).copied()
    }

    fn expect(&mut self, ch: u8) -> Result<(), SpecParseError> {
        if self.peek() == Some(ch) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected '{}'", ch as char))
        }
    }

    fn ident(&mut self) -> &'a str {
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|b| b.is_ascii_lowercase() || b.is_ascii_digit())
        {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn uint(&mut self) -> Result<u64, SpecParseError> {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a number");
        }
        self.src[start..self.pos]
            .parse()
            .map_err(|_| SpecParseError { offset: start, message: "number too large".into() })
    }

    fn int(&mut self) -> Result<i64, SpecParseError> {
        let neg = self.peek() == Some(b'-');
        if neg {
            self.pos += 1;
        }
        let start = self.pos;
        let v = self.uint()?;
        let v = i64::try_from(v)
            .map_err(|_| SpecParseError { offset: start, message: "number too large".into() })?;
        Ok(if neg { -v } else { v })
    }

    /// Slice up to (not including) the next `:`, `;`, `)` or end of input.
    fn until_delimiter(&mut self) -> (usize, &'a str) {
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|b| !matches!(b, b':' | b';' | b')'))
        {
            self.pos += 1;
        }
        (start, &self.src[start..self.pos])
    }
}

fn shift(e: poly::PolyParseError, base: usize) -> SpecParseError {
    SpecParseError { offset: base + e.offset, message: e.message }
}

/// Reads the spec syntax. Prime/primality and shape requirements (monic
/// quotient, one rule per variable, ...) are checked here too, so a parsed
/// spec always realizes to a well-formed table.
pub fn parse_spec(src: &str) -> Result<RingSpec, SpecParseError> {
    let mut cur = Cursor { src, pos: 0 };
    let spec = parse_inner(&mut cur)?;
    if cur.pos != src.len() {
        return cur.err("trailing input after spec");
    }
    Ok(spec)
}

fn parse_inner(cur: &mut Cursor) -> Result<RingSpec, SpecParseError> {
    let kw_start = cur.pos;
    let kw = cur.ident().to_string();
    let kw_err = |msg: &str| SpecParseError { offset: kw_start, message: msg.into() };
    cur.expect(b':')?;
    match kw.as_str() {
        "zmod" => {
            let pos = cur.pos;
            let n = cur.uint()?;
            if n < 2 {
                return Err(SpecParseError { offset: pos, message: "modulus must be >= 2".into() });
            }
            Ok(RingSpec::ZMod(n))
        }
        "gf" => {
            let pos = cur.pos;
            let q = cur.uint()?;
            if cur.peek() == Some(b'^') {
                cur.pos += 1;
                let s_pos = cur.pos;
                let s = cur.uint()?;
                if !is_prime(q) {
                    return Err(SpecParseError { offset: pos, message: format!("{q} is not prime") });
                }
                if s == 0 || s > u32::MAX as u64 {
                    return Err(SpecParseError {
                        offset: s_pos,
                        message: "exponent must be >= 1".into(),
                    });
                }
                Ok(RingSpec::GaloisField { p: q, s: s as u32 })
            } else {
                let f = factorize(q).map_err(|_| SpecParseError {
                    offset: pos,
                    message: "field size must be >= 2".into(),
                })?;
                if !f.is_prime_power() {
                    return Err(SpecParseError {
                        offset: pos,
                        message: format!("{q} is not a prime power"),
                    });
                }
                let (p, s) = f.factors[0];
                Ok(RingSpec::GaloisField { p, s })
            }
        }
        "gaussian" => {
            let pos = cur.pos;
            let n = cur.uint()?;
            if n < 2 {
                return Err(SpecParseError { offset: pos, message: "modulus must be >= 2".into() });
            }
            Ok(RingSpec::Gaussian(n))
        }
        "quad" => {
            let pos = cur.pos;
            let n = cur.uint()?;
            if n < 2 {
                return Err(SpecParseError { offset: pos, message: "modulus must be >= 2".into() });
            }
            cur.expect(b':')?;
            let b = cur.int()?;
            cur.expect(b':')?;
            let c = cur.int()?;
            Ok(RingSpec::Quadratic { n, b, c })
        }
        "sqrt" => {
            let pos = cur.pos;
            let n = cur.uint()?;
            if n < 2 {
                return Err(SpecParseError { offset: pos, message: "modulus must be >= 2".into() });
            }
            cur.expect(b':')?;
            let d = cur.int()?;
            Ok(RingSpec::SqrtD { n, d })
        }
        "polyquot" => {
            let pos = cur.pos;
            let n = cur.uint()?;
            if n < 2 {
                return Err(SpecParseError { offset: pos, message: "modulus must be >= 2".into() });
            }
            cur.expect(b':')?;
            let (base, text) = cur.until_delimiter();
            let f = poly::parse_univariate(text, n).map_err(|e| shift(e, base))?;
            if f.degree().is_none() || f.degree() == Some(0) || !f.is_monic() {
                return Err(SpecParseError {
                    offset: base,
                    message: "quotient polynomial must be monic of degree >= 1".into(),
                });
            }
            Ok(RingSpec::PolyQuot { n, f })
        }
        "product" => {
            let mut parts = Vec::new();
            loop {
                cur.expect(b'(')?;
                parts.push(parse_inner(cur)?);
                cur.expect(b')')?;
                if cur.peek() == Some(b'x') {
                    cur.pos += 1;
                } else {
                    break;
                }
            }
            Ok(RingSpec::Product(parts))
        }
        "matrix" => {
            let pos = cur.pos;
            let d = cur.uint()?;
            if d == 0 || d > 64 {
                return Err(SpecParseError {
                    offset: pos,
                    message: "matrix dimension must be in 1..=64".into(),
                });
            }
            cur.expect(b':')?;
            cur.expect(b'(')?;
            let inner = parse_inner(cur)?;
            cur.expect(b')')?;
            Ok(RingSpec::Matrix { d: d as u32, inner: Box::new(inner) })
        }
        "mvq" => {
            let pos = cur.pos;
            let p = cur.uint()?;
            if !is_prime(p) {
                return Err(SpecParseError { offset: pos, message: format!("{p} is not prime") });
            }
            cur.expect(b':')?;
            let mut vars: Vec<String> = Vec::new();
            loop {
                let v_pos = cur.pos;
                let v = cur.ident();
                if v.is_empty() || v.as_bytes()[0].is_ascii_digit() {
                    return Err(SpecParseError {
                        offset: v_pos,
                        message: "expected a variable name".into(),
                    });
                }
                if vars.iter().any(|w| w == v) {
                    return Err(SpecParseError {
                        offset: v_pos,
                        message: format!("duplicate variable '{v}'"),
                    });
                }
                vars.push(v.to_string());
                if cur.peek() == Some(b',') {
                    cur.pos += 1;
                } else {
                    break;
                }
            }
            cur.expect(b':')?;
            let mut rules = Vec::new();
            loop {
                rules.push(parse_rule(cur, &vars, p)?);
                if cur.peek() == Some(b';') {
                    cur.pos += 1;
                } else {
                    break;
                }
            }
            // one rule per variable keeps the quotient finite
            for v in &vars {
                if !rules.iter().any(|r| &r.var == v) {
                    return Err(SpecParseError {
                        offset: cur.pos,
                        message: format!("missing rule for variable '{v}'"),
                    });
                }
            }
            if rules.len() != vars.len() {
                return Err(SpecParseError {
                    offset: cur.pos,
                    message: "exactly one rule per variable".into(),
                });
            }
            Ok(RingSpec::MultivarQuot { p, vars, rules })
        }
        "noncommp3" => {
            let pos = cur.pos;
            let p = cur.uint()?;
            if !is_prime(p) {
                return Err(SpecParseError { offset: pos, message: format!("{p} is not prime") });
            }
            Ok(RingSpec::NonCommP3(p))
        }
        "" => Err(kw_err("expected a ring spec")),
        other => Err(kw_err(&format!("unknown ring family '{other}'"))),
    }
}

fn parse_rule(cur: &mut Cursor, vars: &[String], p: u64) -> Result<MvqRule, SpecParseError> {
    let v_pos = cur.pos;
    let v = cur.ident().to_string();
    let Some(var_idx) = vars.iter().position(|w| *w == v) else {
        return Err(SpecParseError {
            offset: v_pos,
            message: format!("rule for unknown variable '{v}'"),
        });
    };
    cur.expect(b'^')?;
    let e_pos = cur.pos;
    let e = cur.uint()?;
    if !(2..=64).contains(&e) {
        return Err(SpecParseError {
            offset: e_pos,
            message: "rule exponent must be in 2..=64".into(),
        });
    }
    cur.expect(b'=')?;
    let (base, text) = cur.until_delimiter();
    let replacement = poly::parse_multivariate(text, vars, p).map_err(|e| shift(e, base))?;
    // the rule must not reintroduce its own head, or rewriting cannot stop
    for mono in replacement.terms.keys() {
        if mono.get(var_idx).copied().unwrap_or(0) >= e as u32 {
            return Err(SpecParseError {
                offset: base,
                message: format!("replacement reintroduces {v}^{e}"),
            });
        }
    }
    Ok(MvqRule { var: v, exponent: e as u32, replacement })
}

/// Smallest monic irreducible of degree s over F_p, ordered by the base-p
/// value of the coefficient vector (high coefficients most significant), and
/// certified irreducible by trial division.
pub fn find_irreducible(p: u64, s: u32) -> Result<Poly, RealizeError> {
    if !is_prime(p) {
        return Err(RealizeError::NotPrime(p));
    }
    let s = s as usize;
    assert!(s >= 1, "degree must be >= 1");
    let mut coeffs = vec![0u64; s];
    loop {
        let f = Poly::new(
            p,
            coeffs
                .iter()
                .map(|&c| c as i64)
                .chain(std::iter::once(1)),
        );
        if is_irreducible_mod_p(&f)? {
            return Ok(f);
        }
        // increment the value: low coefficient is the least significant digit
        let mut pos = 0;
        loop {
            assert!(pos < s, "no irreducible of degree {s} over F_{p}?");
            coeffs[pos] += 1;
            if coeffs[pos] < p {
                break;
            }
            coeffs[pos] = 0;
            pos += 1;
        }
    }
}

/// Z/nZ[x]/(f) for monic f, with a caller-chosen label for the residue of x.
fn poly_quotient(n: u64, f: &Poly, x_label: &str) -> Result<FiniteAlgebra, RealizeError> {
    let f = f.reduced(n);
    let d = match f.degree() {
        Some(d) if d >= 1 && f.is_monic() => d,
        _ => return Err(RealizeError::BadQuotientPoly),
    };
    if d > MAX_GENERATORS {
        return Err(RealizeError::TooManyGenerators { got: d, max: MAX_GENERATORS });
    }
    // powers of x reduced mod f, up to the largest degree a basis product hits
    let mut xpow: Vec<Vec<u64>> = Vec::with_capacity(2 * d - 1);
    for e in 0..d {
        let mut v = vec![0u64; d];
        v[e] = 1 % n;
        xpow.push(v);
    }
    for e in d..=(2 * d).saturating_sub(2) {
        let prev = &xpow[e - 1];
        let mut v = vec![0u64; d];
        let top = prev[d - 1];
        for k in 1..d {
            v[k] = prev[k - 1];
        }
        if top != 0 {
            // x^d = -(f_0 + f_1 x + ... + f_{d-1} x^{d-1})
            for k in 0..d {
                let sub = (top as u128 * f.coeff(k) as u128) % n as u128;
                v[k] = ((v[k] as u128 + n as u128 - sub) % n as u128) as u64;
            }
        }
        xpow.push(v);
    }
    let labels = (0..d)
        .map(|e| match e {
            0 => "1".to_string(),
            1 => x_label.to_string(),
            _ => format!("{x_label}^{e}"),
        })
        .collect();
    let mut table = vec![0u64; d * d * d];
    for i in 0..d {
        for j in 0..d {
            let base = (i * d + j) * d;
            table[base..base + d].copy_from_slice(&xpow[i + j]);
        }
    }
    let mut unit = vec![0u64; d];
    unit[0] = 1 % n;
    Ok(FiniteAlgebra::new(labels, vec![n; d], table, unit, true)?)
}

fn realize_mvq(p: u64, vars: &[String], rules: &[MvqRule]) -> Result<FiniteAlgebra, RealizeError> {
    let nv = vars.len();
    let mut compiled = Vec::with_capacity(rules.len());
    let mut bounds = vec![0u32; nv];
    for r in rules {
        let var = vars
            .iter()
            .position(|w| *w == r.var)
            .ok_or_else(|| RealizeError::UnruledVariable(r.var.clone()))?;
        bounds[var] = r.exponent;
        compiled.push(RewriteRule {
            var,
            exponent: r.exponent,
            replacement: r.replacement.clone(),
        });
    }
    if bounds.iter().any(|&b| b == 0) {
        let missing = bounds.iter().position(|&b| b == 0).unwrap();
        return Err(RealizeError::UnruledVariable(vars[missing].clone()));
    }
    let mut m: usize = 1;
    for &b in &bounds {
        m = m.saturating_mul(b as usize);
        if m > MAX_GENERATORS {
            return Err(RealizeError::TooManyGenerators { got: m, max: MAX_GENERATORS });
        }
    }
    // monomial basis, graded order
    let mut basis: Vec<Monomial> = Vec::with_capacity(m);
    let mut cur = vec![0u32; nv];
    loop {
        let mut trimmed = cur.clone();
        while trimmed.last() == Some(&0) {
            trimmed.pop();
        }
        basis.push(trimmed);
        let mut pos = 0;
        loop {
            if pos == nv {
                break;
            }
            cur[pos] += 1;
            if cur[pos] < bounds[pos] {
                break;
            }
            cur[pos] = 0;
            pos += 1;
        }
        if pos == nv {
            break;
        }
    }
    basis.sort_by_key(|mono| monomial_sort_key(mono));
    let index: HashMap<Monomial, usize> =
        basis.iter().cloned().enumerate().map(|(i, b)| (b, i)).collect();
    let to_coords = |q: &MultiPoly| -> Vec<u64> {
        let mut v = vec![0u64; m];
        for (mono, &c) in &q.terms {
            let idx = *index
                .get(mono)
                .expect("normal form stays inside the monomial basis");
            v[idx] = c;
        }
        v
    };
    let mut table = vec![0u64; m * m * m];
    for i in 0..m {
        for j in 0..m {
            let mut prod = MultiPoly::zero(p);
            let mut mono = vec![0u32; nv];
            for (v, slot) in mono.iter_mut().enumerate() {
                *slot = basis[i].get(v).copied().unwrap_or(0) + basis[j].get(v).copied().unwrap_or(0);
            }
            prod.add_term(mono, 1);
            let nf = normal_form(&prod, &compiled, REWRITE_BUDGET)?;
            let row = (i * m + j) * m;
            table[row..row + m].copy_from_slice(&to_coords(&nf));
        }
    }
    let labels = basis
        .iter()
        .map(|mono| {
            if mono.iter().all(|&e| e == 0) {
                "1".to_string()
            } else {
                let mut q = MultiPoly::zero(p);
                q.add_term(mono.clone(), 1);
                print_multivariate(&q, vars)
            }
        })
        .collect();
    let mut unit = vec![0u64; m];
    unit[index[&Vec::new()]] = 1 % p;
    Ok(FiniteAlgebra::new(labels, vec![p; m], table, unit, true)?)
}

/// The non-commutative unital ring of order p^3 (upper-triangular 2x2
/// matrices over F_p) on the basis {1, x, y}: x^2 = 0, xy = x, yx = 0 and y
/// idempotent. Stated with y^2 = 0 the relations force x = (xy)y = x y^2 = 0,
/// so the idempotent reading is the one that actually multiplies
/// associatively; `validate` in the tests pins this down.
fn realize_noncomm_p3(p: u64) -> Result<FiniteAlgebra, RealizeError> {
    if !is_prime(p) {
        return Err(RealizeError::NotPrime(p));
    }
    let table = vec![
        1, 0, 0, 0, 1, 0, 0, 0, 1, // 1*1, 1*x, 1*y
        0, 1, 0, 0, 0, 0, 0, 1, 0, // x*1, x*x = 0, x*y = x
        0, 0, 1, 0, 0, 0, 0, 0, 1, // y*1, y*x = 0, y*y = y
    ];
    Ok(FiniteAlgebra::new(
        vec!["1".into(), "x".into(), "y".into()],
        vec![p, p, p],
        table,
        vec![1, 0, 0],
        false,
    )?)
}

/// Builds the structure-constant table for a spec. Representation size is
/// polynomial in the basis rank, so realization works even for rings far too
/// large to enumerate.
pub fn realize(spec: &RingSpec) -> Result<FiniteAlgebra, RealizeError> {
    match spec {
        RingSpec::ZMod(n) => Ok(FiniteAlgebra::new(
            vec!["1".into()],
            vec![*n],
            vec![1 % n],
            vec![1 % n],
            true,
        )?),
        RingSpec::GaloisField { p, s } => {
            let f = find_irreducible(*p, *s)?;
            poly_quotient(*p, &f, "x")
        }
        RingSpec::Gaussian(n) => poly_quotient(*n, &Poly::new(*n, [1, 0, 1]), "i"),
        RingSpec::Quadratic { n, b, c } => {
            poly_quotient(*n, &Poly::new(*n, [*c, *b, 1]), "x")
        }
        RingSpec::SqrtD { n, d } => {
            poly_quotient(*n, &Poly::new(*n, [-d, 0, 1]), &format!("sqrt({d})"))
        }
        RingSpec::PolyQuot { n, f } => poly_quotient(*n, f, "x"),
        RingSpec::Product(parts) => {
            let mut acc: Option<FiniteAlgebra> = None;
            for part in parts {
                let a = realize(part)?;
                acc = Some(match acc {
                    None => a,
                    Some(l) => {
                        let combined = direct_product(&l, &a);
                        if combined.dim() > MAX_GENERATORS {
                            return Err(RealizeError::TooManyGenerators {
                                got: combined.dim(),
                                max: MAX_GENERATORS,
                            });
                        }
                        combined
                    }
                });
            }
            Ok(acc.unwrap_or_else(|| {
                // empty product: the one-element zero ring
                FiniteAlgebra::new(vec!["1".into()], vec![1], vec![0], vec![0], true)
                    .expect("trivial ring is well-shaped")
            }))
        }
        RingSpec::Matrix { d, inner } => {
            let a = realize(inner)?;
            let m = (*d as usize) * (*d as usize) * a.dim();
            if m > MAX_GENERATORS {
                return Err(RealizeError::TooManyGenerators { got: m, max: MAX_GENERATORS });
            }
            Ok(matrix_algebra(*d as usize, &a))
        }
        RingSpec::MultivarQuot { p, vars, rules } => realize_mvq(*p, vars, rules),
        RingSpec::NonCommP3(p) => realize_noncomm_p3(*p),
    }
}

/// Number of elements the realized ring will have, computed without
/// building anything. None when the count overflows u128 (such a ring could
/// never be realized anyway).
pub fn spec_order(spec: &RingSpec) -> Option<u128> {
    fn pow(base: u128, exp: u128) -> Option<u128> {
        let mut acc: u128 = 1;
        for _ in 0..exp {
            acc = acc.checked_mul(base)?;
        }
        Some(acc)
    }
    match spec {
        RingSpec::ZMod(n) => Some(*n as u128),
        RingSpec::GaloisField { p, s } => pow(*p as u128, *s as u128),
        RingSpec::Gaussian(n) | RingSpec::Quadratic { n, .. } | RingSpec::SqrtD { n, .. } => {
            (*n as u128).checked_mul(*n as u128)
        }
        RingSpec::PolyQuot { n, f } => pow(*n as u128, f.degree()? as u128),
        RingSpec::Product(parts) => {
            let mut acc: u128 = 1;
            for part in parts {
                acc = acc.checked_mul(spec_order(part)?)?;
            }
            Some(acc)
        }
        RingSpec::Matrix { d, inner } => {
            pow(spec_order(inner)?, (*d as u128).checked_mul(*d as u128)?)
        }
        RingSpec::MultivarQuot { p, rules, .. } => {
            let mut dim: u128 = 1;
            for r in rules {
                dim = dim.checked_mul(r.exponent as u128)?;
            }
            pow(*p as u128, dim)
        }
        RingSpec::NonCommP3(p) => pow(*p as u128, 3),
    }
}

/// True when every part of the spec multiplies commutatively by
/// construction (matrix parts of dimension >= 2 and the order-p^3 ring are
/// the non-commutative shapes).
pub fn spec_is_commutative(spec: &RingSpec) -> bool {
    match spec {
        RingSpec::Matrix { d, inner } => *d == 1 && spec_is_commutative(inner),
        RingSpec::NonCommP3(_) => false,
        RingSpec::Product(parts) => parts.iter().all(spec_is_commutative),
        RingSpec::MultivarQuot { .. } => true,
        _ => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Element;

    fn el(coords: &[u64]) -> Element {
        Element { coords: coords.to_vec() }
    }

    #[test]
    fn parse_leaves() {
        assert_eq!(parse_spec("zmod:12").unwrap(), RingSpec::ZMod(12));
        assert_eq!(parse_spec("gf:4").unwrap(), RingSpec::GaloisField { p: 2, s: 2 });
        assert_eq!(parse_spec("gf:2^2").unwrap(), RingSpec::GaloisField { p: 2, s: 2 });
        assert_eq!(parse_spec("gaussian:6").unwrap(), RingSpec::Gaussian(6));
        assert_eq!(
            parse_spec("quad:10:1:1").unwrap(),
            RingSpec::Quadratic { n: 10, b: 1, c: 1 }
        );
        assert_eq!(parse_spec("sqrt:6:-5").unwrap(), RingSpec::SqrtD { n: 6, d: -5 });
        assert_eq!(
            parse_spec("polyquot:6:x^3+x+1").unwrap(),
            RingSpec::PolyQuot { n: 6, f: Poly::new(6, [1, 1, 0, 1]) }
        );
        assert_eq!(parse_spec("noncommp3:3").unwrap(), RingSpec::NonCommP3(3));
    }

    #[test]
    fn parse_compound() {
        assert_eq!(
            parse_spec("product:(gf:4)x(zmod:9)").unwrap(),
            RingSpec::Product(vec![
                RingSpec::GaloisField { p: 2, s: 2 },
                RingSpec::ZMod(9)
            ])
        );
        assert_eq!(
            parse_spec("matrix:2:(gf:2)").unwrap(),
            RingSpec::Matrix { d: 2, inner: Box::new(RingSpec::GaloisField { p: 2, s: 1 }) }
        );
        let mvq = parse_spec("mvq:3:x,y:x^2=2+2*y^2;y^2=1+x").unwrap();
        let RingSpec::MultivarQuot { p, vars, rules } = &mvq else {
            panic!("wrong variant")
        };
        assert_eq!(*p, 3);
        assert_eq!(vars, &["x".to_string(), "y".to_string()]);
        assert_eq!(rules.len(), 2);
        assert_eq!(rules[0].var, "x");
        assert_eq!(rules[1].exponent, 2);
        // nested product
        let nested = parse_spec("product:(product:(zmod:2)x(zmod:3))x(gaussian:5)").unwrap();
        assert!(matches!(nested, RingSpec::Product(ref v) if v.len() == 2));
    }

    #[test]
    fn parse_errors_have_offsets() {
        let e = parse_spec("zmod:").unwrap_err();
        assert_eq!(e.offset, 5);
        let e = parse_spec("gf:6").unwrap_err();
        assert_eq!(e.offset, 3);
        assert!(e.message.contains("not a prime power"));
        let e = parse_spec("quad:4:1").unwrap_err();
        assert_eq!(e.offset, 8);
        let e = parse_spec("zmod:12trailing").unwrap_err();
        assert_eq!(e.offset, 7);
        let e = parse_spec("polyquot:4:3*x^2+1").unwrap_err();
        assert!(e.message.contains("monic"));
        let e = parse_spec("mvq:3:x,y:x^2=1").unwrap_err();
        assert!(e.message.contains("missing rule for variable 'y'"));
        let e = parse_spec("mvq:3:x:x^2=x^3").unwrap_err();
        assert!(e.message.contains("reintroduces"));
        let e = parse_spec("frobnicate:4").unwrap_err();
        assert_eq!(e.offset, 0);
    }

    #[test]
    fn display_round_trips() {
        for text in [
            "zmod:12",
            "gf:2^2",
            "gaussian:6",
            "quad:10:1:1",
            "sqrt:6:-5",
            "polyquot:6:x^3+x+1",
            "product:(gf:2^2)x(zmod:9)",
            "matrix:2:(gf:2^1)",
            "mvq:3:x,y:x^2=2+2*y^2;y^2=1+x",
            "noncommp3:3",
            "product:(product:(zmod:2)x(zmod:3))x(gaussian:5)",
        ] {
            let ast = parse_spec(text).unwrap();
            assert_eq!(ast.to_string(), text);
            assert_eq!(parse_spec(&ast.to_string()).unwrap(), ast);
        }
        // non-canonical inputs still round-trip at the AST level
        for text in ["gf:8", "polyquot:4:x^2+7"] {
            let ast = parse_spec(text).unwrap();
            assert_eq!(parse_spec(&ast.to_string()).unwrap(), ast);
        }
    }

    #[test]
    fn canonical_irreducibles() {
        assert_eq!(find_irreducible(2, 2).unwrap(), Poly::new(2, [1, 1, 1]));
        assert_eq!(find_irreducible(3, 2).unwrap(), Poly::new(3, [1, 0, 1]));
        assert_eq!(find_irreducible(2, 3).unwrap(), Poly::new(2, [1, 1, 0, 1]));
        assert_eq!(find_irreducible(5, 1).unwrap(), Poly::new(5, [0, 1]));
    }

    #[test]
    fn realize_zmod_and_gaussian() {
        let z4 = realize(&RingSpec::ZMod(4)).unwrap();
        assert_eq!(z4.order(), 4);
        assert_eq!(z4.characteristic(), 4);
        assert!(z4.validate().is_empty());

        let g3 = realize(&RingSpec::Gaussian(3)).unwrap();
        assert_eq!(g3.order(), 9);
        assert_eq!(g3.labels(), &["1".to_string(), "i".to_string()]);
        // i * i = -1 = 2
        let i = el(&[0, 1]);
        assert_eq!(g3.mul(&i, &i), el(&[2, 0]));
        assert!(g3.validate().is_empty());
    }

    #[test]
    fn realize_galois_fields_have_inverses() {
        for (p, s) in [(2u64, 1u32), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (3, 3), (5, 2), (7, 2)]
        {
            let f = realize(&RingSpec::GaloisField { p, s }).unwrap();
            let q = p.pow(s);
            assert_eq!(f.order(), q as u128);
            assert_eq!(f.characteristic(), p as u128);
            assert!(f.validate().is_empty());
            let elements: Vec<Element> = f.enumerate(10_000).unwrap().collect();
            for a in &elements {
                if *a == f.zero() {
                    continue;
                }
                assert!(
                    elements.iter().any(|b| f.mul(a, b) == f.one()),
                    "no inverse for {:?} in gf:{p}^{s}",
                    a
                );
            }
        }
    }

    #[test]
    fn realize_galois_field_multiplication_table() {
        // gf:4 built on x^2+x+1, so x^2 = x+1
        let f4 = realize(&parse_spec("gf:4").unwrap()).unwrap();
        let x = el(&[0, 1]);
        assert_eq!(f4.mul(&x, &x), el(&[1, 1]));
    }

    #[test]
    fn realize_products_fold() {
        let p = parse_spec("product:(zmod:2)x(zmod:3)").unwrap();
        let a = realize(&p).unwrap();
        let b = direct_product(
            &realize(&RingSpec::ZMod(2)).unwrap(),
            &realize(&RingSpec::ZMod(3)).unwrap(),
        );
        assert_eq!(a, b);
        assert_eq!(a.order(), 6);

        let empty = realize(&RingSpec::Product(vec![])).unwrap();
        assert_eq!(empty.order(), 1);
        assert_eq!(empty.characteristic(), 1);
        assert!(empty.validate().is_empty());

        let single = realize(&RingSpec::Product(vec![RingSpec::ZMod(7)])).unwrap();
        assert_eq!(single, realize(&RingSpec::ZMod(7)).unwrap());
    }

    #[test]
    fn realize_polyquot_cube() {
        let spec = parse_spec("polyquot:6:x^3+x+1").unwrap();
        let a = realize(&spec).unwrap();
        assert_eq!(a.order(), 216);
        assert_eq!(a.labels(), &["1".to_string(), "x".to_string(), "x^2".to_string()]);
        assert!(a.validate().is_empty());
        // x * x^2 = x^3 = -x - 1 = 5 + 5x
        let x = el(&[0, 1, 0]);
        let x2 = el(&[0, 0, 1]);
        assert_eq!(a.mul(&x, &x2), el(&[5, 5, 0]));
    }

    #[test]
    fn realize_mvq_remark_ring() {
        let spec = parse_spec("mvq:3:x,y:x^2=2+2*y^2;y^2=1+x").unwrap();
        let a = realize(&spec).unwrap();
        assert_eq!(a.order(), 81);
        assert_eq!(
            a.labels(),
            &["1".to_string(), "x".to_string(), "y".to_string(), "x*y".to_string()]
        );
        assert!(a.validate().is_empty());
        // x*x reduces through both rules: 2+2y^2 -> 2+2(1+x) = 1+2x
        let x = el(&[0, 1, 0, 0]);
        assert_eq!(a.mul(&x, &x), el(&[1, 2, 0, 0]));
    }

    #[test]
    fn realize_noncomm_order_27() {
        let a = realize(&RingSpec::NonCommP3(3)).unwrap();
        assert_eq!(a.order(), 27);
        assert!(!a.is_commutative());
        assert!(a.validate().is_empty());
        let x = el(&[0, 1, 0]);
        let y = el(&[0, 0, 1]);
        assert_eq!(a.mul(&x, &y), x);
        assert_eq!(a.mul(&y, &x), a.zero());
        assert_eq!(a.mul(&x, &x), a.zero());
        assert_eq!(spec_is_commutative(&RingSpec::NonCommP3(3)), false);
    }

    #[test]
    fn quadratic_tables_satisfy_defining_relation() {
        for n in 2..=30u64 {
            for b in 0..n.min(6) {
                for c in 0..n.min(6) {
                    let a = realize(&RingSpec::Quadratic { n, b: b as i64, c: c as i64 })
                        .unwrap();
                    let x = el(&[0, 1]);
                    let lhs = a.mul(&x, &x);
                    let rhs = el(&[(n - c % n) % n, (n - b % n) % n]);
                    assert_eq!(lhs, rhs, "x^2 = -c-bx fails for n={n} b={b} c={c}");
                    debug_assert!(a.validate().is_empty());
                }
            }
        }
    }

    #[test]
    fn sqrt_realization_matches_gaussian_for_minus_one() {
        let s = realize(&RingSpec::SqrtD { n: 7, d: -1 }).unwrap();
        let g = realize(&RingSpec::Gaussian(7)).unwrap();
        // same table, different label for the adjoined root
        assert_eq!(s.orders(), g.orders());
        assert_eq!(s.labels()[1], "sqrt(-1)");
        let r = el(&[0, 1]);
        assert_eq!(s.mul(&r, &r), g.mul(&r, &r));
    }

    #[test]
    fn validate_is_empty_for_a_spec_corpus() {
        for text in [
            "zmod:2",
            "zmod:16",
            "gf:9",
            "gf:2^4",
            "gaussian:4",
            "gaussian:10",
            "quad:12:7:5",
            "sqrt:6:5",
            "polyquot:4:x^3+x^2+1",
            "product:(zmod:4)x(gf:9)x(zmod:25)",
            "matrix:2:(zmod:6)",
            "matrix:3:(gf:2)",
            "mvq:2:x:x^2=x",
            "mvq:5:u,v:u^2=1+v;v^3=2*u",
            "noncommp3:5",
        ] {
            let a = realize(&parse_spec(text).unwrap()).unwrap();
            assert!(a.validate().is_empty(), "violations for {text}");
        }
    }
}
