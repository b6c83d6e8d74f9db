//! Finite rings as structure-constant tables over a basis of additive cyclic
//! generators. An algebra of rank m stores, for each pair of basis elements,
//! the coordinate vector of their product; elements are coordinate vectors
//! reduced mod the per-generator additive orders. This one representation
//! covers Z/nZ, polynomial quotients, products, matrix rings and the
//! hand-built exceptional rings, so the enumeration oracle has a single code
//! path.

use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("structure table has wrong shape: expected {expected} entries, got {got}")]
    TableShape { expected: usize, got: usize },
    #[error("basis metadata lengths disagree")]
    BasisShape,
    #[error("additive orders must be >= 1")]
    ZeroOrder,
    #[error("algebra order overflows u128")]
    OrderOverflow,
    #[error("ring has {order} elements, over the enumeration bound {max}")]
    SizeBound { order: u128, max: u64 },
}

/// Ring element: coordinates in the basis of its algebra, each reduced mod
/// the matching additive order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Element {
    pub coords: Vec<u64>,
}

/// A law that fails under `validate`, pinpointed by basis indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// d_k does not divide d_i * table[i][j][k] (scaling a factor to zero
    /// must kill the product coordinate).
    Bilinearity { i: usize, j: usize, k: usize },
    UnitLeft { j: usize },
    UnitRight { j: usize },
    Associativity { i: usize, j: usize, k: usize },
    Commutativity { i: usize, j: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::Bilinearity { i, j, k } => {
                write!(f, "bilinearity fails at table[{i}][{j}] coordinate {k}")
            }
            Violation::UnitLeft { j } => write!(f, "1*b{j} != b{j}"),
            Violation::UnitRight { j } => write!(f, "b{j}*1 != b{j}"),
            Violation::Associativity { i, j, k } => {
                write!(f, "(b{i}*b{j})*b{k} != b{i}*(b{j}*b{k})")
            }
            Violation::Commutativity { i, j } => write!(f, "b{i}*b{j} != b{j}*b{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAlgebra {
    labels: Vec<String>,
    orders: Vec<u64>,
    /// Flattened m*m*m table: coordinate k of b_i * b_j at (i*m + j)*m + k.
    table: Vec<u64>,
    unit: Vec<u64>,
    commutative: bool,
    order: u128,
}

impl FiniteAlgebra {
    pub fn new(
        labels: Vec<String>,
        orders: Vec<u64>,
        mut table: Vec<u64>,
        unit: Vec<u64>,
        commutative: bool,
    ) -> Result<Self, AlgebraError> {
        let m = labels.len();
        if orders.len() != m || unit.len() != m {
            return Err(AlgebraError::BasisShape);
        }
        if orders.iter().any(|&d| d == 0) {
            return Err(AlgebraError::ZeroOrder);
        }
        if table.len() != m * m * m {
            return Err(AlgebraError::TableShape { expected: m * m * m, got: table.len() });
        }
        for (idx, t) in table.iter_mut().enumerate() {
            *t %= orders[idx % m];
        }
        let mut order: u128 = 1;
        for &d in &orders {
            order = order
                .checked_mul(d as u128)
                .ok_or(AlgebraError::OrderOverflow)?;
        }
        let unit = unit
            .iter()
            .zip(&orders)
            .map(|(&u, &d)| u % d)
            .collect();
        Ok(FiniteAlgebra { labels, orders, table, unit, commutative, order })
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn is_commutative(&self) -> bool {
        self.commutative
    }

    /// Number of ring elements (product of the additive orders).
    pub fn order(&self) -> u128 {
        self.order
    }

    /// Additive order of the unit.
    pub fn characteristic(&self) -> u128 {
        let mut ch: u128 = 1;
        for (&u, &d) in self.unit.iter().zip(&self.orders) {
            let ord = if u == 0 { 1 } else { (d / crate::numtheory::gcd(d, u)) as u128 };
            ch = crate::numtheory::lcm_u128(ch, ord);
        }
        ch
    }

    pub fn zero(&self) -> Element {
        Element { coords: vec![0; self.dim()] }
    }

    pub fn one(&self) -> Element {
        Element { coords: self.unit.clone() }
    }

    pub fn basis_element(&self, j: usize) -> Element {
        let mut coords = vec![0; self.dim()];
        coords[j] = 1 % self.orders[j];
        Element { coords }
    }

    pub fn add(&self, a: &Element, b: &Element) -> Element {
        let coords = a
            .coords
            .iter()
            .zip(&b.coords)
            .zip(&self.orders)
            .map(|((&x, &y), &d)| {
                (((x as u128) + (y as u128)) % d as u128) as u64
            })
            .collect();
        Element { coords }
    }

    pub fn neg(&self, a: &Element) -> Element {
        let coords = a
            .coords
            .iter()
            .zip(&self.orders)
            .map(|(&x, &d)| (d - x) % d)
            .collect();
        Element { coords }
    }

    pub fn mul(&self, a: &Element, b: &Element) -> Element {
        let m = self.dim();
        let mut out = vec![0u64; m];
        for (i, &ai) in a.coords.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.coords.iter().enumerate() {
                if bj == 0 {
                    continue;
                }
                let s = ai as u128 * bj as u128;
                let base = (i * m + j) * m;
                for (k, slot) in out.iter_mut().enumerate() {
                    let t = self.table[base + k];
                    if t == 0 {
                        continue;
                    }
                    let dk = self.orders[k] as u128;
                    let term = (s % dk) * (t as u128) % dk;
                    *slot = ((*slot as u128 + term) % dk) as u64;
                }
            }
        }
        Element { coords: out }
    }

    /// a^k by square-and-multiply; a^0 is the unit by convention.
    pub fn pow(&self, a: &Element, mut k: u64) -> Element {
        let mut acc = self.one();
        let mut base = a.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// n * a in the additive group (per-coordinate scaling).
    pub fn scale(&self, a: &Element, n: u128) -> Element {
        let coords = a
            .coords
            .iter()
            .zip(&self.orders)
            .map(|(&c, &d)| ((n % d as u128) * (c as u128) % d as u128) as u64)
            .collect();
        Element { coords }
    }

    /// The image of the integer c, i.e. c * 1. Reduction happens
    /// per-coordinate, so arbitrarily large c is fine.
    pub fn embed_integer(&self, c: i128) -> Element {
        let coords = self
            .unit
            .iter()
            .zip(&self.orders)
            .map(|(&u, &d)| {
                let di = d as i128;
                let r = c.rem_euclid(di) as u128;
                (r * u as u128 % d as u128) as u64
            })
            .collect();
        Element { coords }
    }

    /// Element at a mixed-radix index, coordinate 0 fastest. The inverse of
    /// the enumeration order.
    pub fn element_at(&self, mut idx: u64) -> Element {
        let coords = self
            .orders
            .iter()
            .map(|&d| {
                let c = idx % d;
                idx /= d;
                c
            })
            .collect();
        Element { coords }
    }

    /// Checks the order against an enumeration cap and returns it as a
    /// walkable u64.
    pub fn enumerable_order(&self, max_elements: u64) -> Result<u64, AlgebraError> {
        if self.order > max_elements as u128 {
            return Err(AlgebraError::SizeBound { order: self.order, max: max_elements });
        }
        Ok(self.order as u64)
    }

    /// All elements in mixed-radix order, refusing rings over the cap.
    /// Disjoint index ranges fed to `element_at` give the same sequence, so
    /// scans can be chunked.
    pub fn enumerate(
        &self,
        max_elements: u64,
    ) -> Result<impl Iterator<Item = Element> + '_, AlgebraError> {
        let n = self.enumerable_order(max_elements)?;
        Ok((0..n).map(move |i| self.element_at(i)))
    }

    /// Checks every ring law on the basis: bilinearity consistency of the
    /// table with the additive orders, the unit laws, associativity on all
    /// basis triples, and commutativity when flagged. Empty means the table
    /// presents an actual unital ring.
    pub fn validate(&self) -> Vec<Violation> {
        let m = self.dim();
        let mut out = Vec::new();
        for i in 0..m {
            for j in 0..m {
                let base = (i * m + j) * m;
                for k in 0..m {
                    let t = self.table[base + k] as u128;
                    let dk = self.orders[k] as u128;
                    if (self.orders[i] as u128 * t) % dk != 0
                        || (self.orders[j] as u128 * t) % dk != 0
                    {
                        out.push(Violation::Bilinearity { i, j, k });
                    }
                }
            }
        }
        let one = self.one();
        for j in 0..m {
            let bj = self.basis_element(j);
            if self.mul(&one, &bj) != bj {
                out.push(Violation::UnitLeft { j });
            }
            if self.mul(&bj, &one) != bj {
                out.push(Violation::UnitRight { j });
            }
        }
        for i in 0..m {
            let bi = self.basis_element(i);
            for j in 0..m {
                let bj = self.basis_element(j);
                let ij = self.mul(&bi, &bj);
                for k in 0..m {
                    let bk = self.basis_element(k);
                    if self.mul(&ij, &bk) != self.mul(&bi, &self.mul(&bj, &bk)) {
                        out.push(Violation::Associativity { i, j, k });
                    }
                }
                if self.commutative && self.mul(&bi, &bj) != self.mul(&bj, &bi) {
                    out.push(Violation::Commutativity { i, j });
                }
            }
        }
        out
    }

    /// Human-readable element: `0`, `3`, `1+i`, `2+2*x`, ...
    pub fn pretty(&self, e: &Element) -> String {
        let mut out = String::new();
        for (j, &c) in e.coords.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !out.is_empty() {
                out.push('+');
            }
            let label = &self.labels[j];
            if label == "1" {
                let _ = write!(out, "{c}");
            } else if c == 1 {
                out.push_str(label);
            } else {
                let _ = write!(out, "{c}*{label}");
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

/// Product ring A x B; basis labels of the factors are prefixed `f0.`/`f1.`
/// so coordinates stay unambiguous.
pub fn direct_product(a: &FiniteAlgebra, b: &FiniteAlgebra) -> FiniteAlgebra {
    let ma = a.dim();
    let mb = b.dim();
    let m = ma + mb;
    let mut labels = Vec::with_capacity(m);
    labels.extend(a.labels.iter().map(|l| format!("f0.{l}")));
    labels.extend(b.labels.iter().map(|l| format!("f1.{l}")));
    let mut orders = a.orders.clone();
    orders.extend_from_slice(&b.orders);
    let mut table = vec![0u64; m * m * m];
    for i in 0..ma {
        for j in 0..ma {
            for k in 0..ma {
                table[(i * m + j) * m + k] = a.table[(i * ma + j) * ma + k];
            }
        }
    }
    for i in 0..mb {
        for j in 0..mb {
            for k in 0..mb {
                table[((ma + i) * m + ma + j) * m + ma + k] = b.table[(i * mb + j) * mb + k];
            }
        }
    }
    let mut unit = a.unit.clone();
    unit.extend_from_slice(&b.unit);
    FiniteAlgebra::new(labels, orders, table, unit, a.commutative && b.commutative)
        .expect("product of valid algebras is well-shaped")
}

/// d x d matrices over A. Basis is E_uv * b_t (row-major u, v, then the inner
/// basis); labels like `E12` or `E12*x`. d = 1 returns the inner algebra
/// unchanged.
pub fn matrix_algebra(d: usize, a: &FiniteAlgebra) -> FiniteAlgebra {
    assert!(d >= 1);
    if d == 1 {
        return a.clone();
    }
    let ma = a.dim();
    let m = d * d * ma;
    let mut labels = Vec::with_capacity(m);
    let mut orders = Vec::with_capacity(m);
    for u in 0..d {
        for v in 0..d {
            for t in 0..ma {
                let inner = &a.labels[t];
                if inner == "1" {
                    labels.push(format!("E{}{}", u + 1, v + 1));
                } else {
                    labels.push(format!("E{}{}*{}", u + 1, v + 1, inner));
                }
                orders.push(a.orders[t]);
            }
        }
    }
    let idx = |u: usize, v: usize, t: usize| (u * d + v) * ma + t;
    let mut table = vec![0u64; m * m * m];
    for u in 0..d {
        for v in 0..d {
            for i in 0..ma {
                for w in 0..d {
                    for z in 0..d {
                        for j in 0..ma {
                            if v != w {
                                continue;
                            }
                            let row = (idx(u, v, i) * m + idx(w, z, j)) * m;
                            for k in 0..ma {
                                table[row + idx(u, z, k)] = a.table[(i * ma + j) * ma + k];
                            }
                        }
                    }
                }
            }
        }
    }
    let mut unit = vec![0u64; m];
    for u in 0..d {
        for t in 0..ma {
            unit[idx(u, u, t)] = a.unit[t];
        }
    }
    FiniteAlgebra::new(labels, orders, table, unit, false)
        .expect("matrix algebra over a valid algebra is well-shaped")
}
