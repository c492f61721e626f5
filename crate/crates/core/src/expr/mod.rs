//! Expression trees over the spatial variable `x`.
//!
//! Coefficients of every time-power series are [`Expr`] values. Trees are
//! immutable and reference counted, so sub-expressions are shared freely
//! between series terms and their derivatives. The normalizing constructors
//! ([`Expr::sum`], [`Expr::product`], [`Expr::pow`], [`Expr::exp`]) fold
//! constants, flatten nested sums/products and collect structurally identical
//! terms and factors. No other algebraic canonicalization is attempted:
//! two expressions are considered equal when they agree numerically on a
//! fixed sample set (see [`approx_eq`]).

mod diff;
mod eval;
mod parse;
mod print;

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_rational::Rational64;
use thiserror::Error;

pub use diff::Differentiator;
pub use parse::parse;

/// Name of the spatial variable bound by [`Expr::evaluate`].
pub const SPATIAL_VAR: &str = "x";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown symbol `{name}` at byte {offset}")]
    UnknownSymbol { name: String, offset: usize },
    #[error("domain error in `{subtree}`: {reason}")]
    Domain { subtree: String, reason: String },
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
}

/// Node payload. Building a node through [`Expr::from_kind`] performs no
/// normalization at all.
#[derive(Debug, Clone)]
pub enum ExprKind {
    Constant(f64),
    Variable(Arc<str>),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Expr, Rational64),
    Exp(Expr),
    Neg(Expr),
}

#[derive(Debug)]
struct Node {
    kind: ExprKind,
    hash: u64,
}

#[derive(Clone)]
pub struct Expr(Arc<Node>);

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn combine(h: u64, v: u64) -> u64 {
    splitmix(h.rotate_left(5) ^ v)
}

fn const_bits(c: f64) -> u64 {
    // -0.0 and 0.0 hash (and compare) alike
    if c == 0.0 {
        0
    } else {
        c.to_bits()
    }
}

fn structural_hash(kind: &ExprKind) -> u64 {
    match kind {
        ExprKind::Constant(c) => combine(1, const_bits(*c)),
        ExprKind::Variable(name) => {
            let mut h = 2u64;
            for b in name.bytes() {
                h = combine(h, b as u64);
            }
            h
        }
        ExprKind::Add(children) => children.iter().fold(3, |h, c| combine(h, c.0.hash)),
        ExprKind::Mul(children) => children.iter().fold(4, |h, c| combine(h, c.0.hash)),
        ExprKind::Pow(base, r) => combine(
            combine(combine(5, base.0.hash), *r.numer() as u64),
            *r.denom() as u64,
        ),
        ExprKind::Exp(arg) => combine(6, arg.0.hash),
        ExprKind::Neg(arg) => combine(7, arg.0.hash),
    }
}

/// Hash/Eq wrapper comparing expressions by structure.
#[derive(Clone)]
pub(crate) struct StructKey(pub(crate) Expr);

impl PartialEq for StructKey {
    fn eq(&self, other: &Self) -> bool {
        self.0.structurally_eq(&other.0)
    }
}
impl Eq for StructKey {}
impl Hash for StructKey {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0 .0.hash);
    }
}

impl Expr {
    /// Wraps a node without any normalization.
    pub fn from_kind(kind: ExprKind) -> Expr {
        let hash = structural_hash(&kind);
        Expr(Arc::new(Node { kind, hash }))
    }

    pub fn kind(&self) -> &ExprKind {
        &self.0.kind
    }

    pub fn constant(c: f64) -> Expr {
        Expr::from_kind(ExprKind::Constant(c))
    }

    pub fn zero() -> Expr {
        Expr::constant(0.0)
    }

    pub fn one() -> Expr {
        Expr::constant(1.0)
    }

    pub fn var(name: &str) -> Expr {
        Expr::from_kind(ExprKind::Variable(Arc::from(name)))
    }

    /// The spatial variable `x`.
    pub fn x() -> Expr {
        Expr::var(SPATIAL_VAR)
    }

    pub fn as_constant(&self) -> Option<f64> {
        match self.kind() {
            ExprKind::Constant(c) => Some(*c),
            _ => None,
        }
    }

    /// True only for a literal zero constant.
    pub fn is_zero(&self) -> bool {
        self.as_constant() == Some(0.0)
    }

    pub fn ptr_eq(&self, other: &Expr) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub(crate) fn node_id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub(crate) fn is_shared(&self) -> bool {
        Arc::strong_count(&self.0) > 1
    }

    pub fn structurally_eq(&self, other: &Expr) -> bool {
        if self.ptr_eq(other) {
            return true;
        }
        if self.0.hash != other.0.hash {
            return false;
        }
        use ExprKind::*;
        match (self.kind(), other.kind()) {
            (Constant(a), Constant(b)) => const_bits(*a) == const_bits(*b),
            (Variable(a), Variable(b)) => a == b,
            (Add(a), Add(b)) | (Mul(a), Mul(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(p, q)| p.structurally_eq(q))
            }
            (Pow(a, r), Pow(b, s)) => r == s && a.structurally_eq(b),
            (Exp(a), Exp(b)) | (Neg(a), Neg(b)) => a.structurally_eq(b),
            _ => false,
        }
    }

    /// Number of distinct nodes reachable from this root.
    pub fn node_count(&self) -> usize {
        fn walk(e: &Expr, seen: &mut std::collections::HashSet<usize>) {
            if !seen.insert(e.node_id()) {
                return;
            }
            match e.kind() {
                ExprKind::Constant(_) | ExprKind::Variable(_) => {}
                ExprKind::Add(c) | ExprKind::Mul(c) => c.iter().for_each(|c| walk(c, seen)),
                ExprKind::Pow(b, _) => walk(b, seen),
                ExprKind::Exp(a) | ExprKind::Neg(a) => walk(a, seen),
            }
        }
        let mut seen = std::collections::HashSet::new();
        walk(self, &mut seen);
        seen.len()
    }

    /// Sum with constant folding, flattening and collection of like terms.
    pub fn sum<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
        let mut constant = 0.0;
        let mut groups: Vec<(Expr, f64)> = Vec::new();
        let mut index: HashMap<StructKey, usize> = HashMap::new();

        fn visit(
            e: Expr,
            sign: f64,
            constant: &mut f64,
            groups: &mut Vec<(Expr, f64)>,
            index: &mut HashMap<StructKey, usize>,
        ) {
            match e.kind() {
                ExprKind::Add(children) => {
                    for c in children {
                        visit(c.clone(), sign, constant, groups, index);
                    }
                }
                ExprKind::Neg(inner) => visit(inner.clone(), -sign, constant, groups, index),
                _ => {
                    let (coef, rest) = split_coefficient(&e);
                    match rest {
                        None => *constant += sign * coef,
                        Some(rest) => {
                            let key = StructKey(rest.clone());
                            match index.get(&key) {
                                Some(&i) => groups[i].1 += sign * coef,
                                None => {
                                    index.insert(key, groups.len());
                                    groups.push((rest, sign * coef));
                                }
                            }
                        }
                    }
                }
            }
        }

        for t in terms {
            visit(t, 1.0, &mut constant, &mut groups, &mut index);
        }

        let mut out: Vec<Expr> = groups
            .into_iter()
            .filter(|(_, c)| *c != 0.0)
            .map(|(rest, c)| with_coefficient(c, rest))
            .collect();
        if constant != 0.0 || out.is_empty() {
            out.push(Expr::constant(constant));
        }
        if out.len() == 1 {
            out.pop().unwrap()
        } else {
            Expr::from_kind(ExprKind::Add(out))
        }
    }

    /// Product with constant folding, flattening and merging of equal bases
    /// into powers.
    pub fn product<I: IntoIterator<Item = Expr>>(factors: I) -> Expr {
        let mut coef = 1.0;
        let mut groups: Vec<(Expr, Rational64)> = Vec::new();
        let mut index: HashMap<StructKey, usize> = HashMap::new();

        fn add_factor(
            base: Expr,
            r: Rational64,
            groups: &mut Vec<(Expr, Rational64)>,
            index: &mut HashMap<StructKey, usize>,
        ) {
            let key = StructKey(base.clone());
            match index.get(&key) {
                Some(&i) => groups[i].1 += r,
                None => {
                    index.insert(key, groups.len());
                    groups.push((base, r));
                }
            }
        }

        fn visit(
            e: Expr,
            coef: &mut f64,
            groups: &mut Vec<(Expr, Rational64)>,
            index: &mut HashMap<StructKey, usize>,
        ) {
            match e.kind() {
                ExprKind::Constant(c) => *coef *= c,
                ExprKind::Neg(inner) => {
                    *coef = -*coef;
                    visit(inner.clone(), coef, groups, index);
                }
                ExprKind::Mul(children) => {
                    for c in children {
                        visit(c.clone(), coef, groups, index);
                    }
                }
                ExprKind::Pow(b, r) => add_factor(b.clone(), *r, groups, index),
                _ => add_factor(e.clone(), Rational64::from_integer(1), groups, index),
            }
        }

        for f in factors {
            visit(f, &mut coef, &mut groups, &mut index);
        }
        if coef == 0.0 {
            return Expr::zero();
        }

        let mut out = Vec::with_capacity(groups.len() + 1);
        for (base, r) in groups {
            if *r.numer() == 0 {
                continue;
            }
            let p = Expr::pow(base, r);
            match p.kind() {
                ExprKind::Constant(c) => coef *= c,
                ExprKind::Mul(children) => {
                    for c in children {
                        match c.kind() {
                            ExprKind::Constant(k) => coef *= k,
                            _ => out.push(c.clone()),
                        }
                    }
                }
                _ => out.push(p),
            }
        }
        if coef == 0.0 {
            return Expr::zero();
        }
        if out.is_empty() {
            return Expr::constant(coef);
        }
        if coef == 1.0 && out.len() == 1 {
            return out.pop().unwrap();
        }
        if coef != 1.0 {
            out.insert(0, Expr::constant(coef));
        }
        Expr::from_kind(ExprKind::Mul(out))
    }

    /// `base^r` for a rational exponent.
    pub fn pow(base: Expr, r: Rational64) -> Expr {
        if *r.numer() == 0 {
            return Expr::one();
        }
        if r == Rational64::from_integer(1) {
            return base;
        }
        let integral = r.is_integer();
        match base.kind() {
            ExprKind::Constant(c) => {
                let c = *c;
                if integral && !(c == 0.0 && *r.numer() < 0) {
                    return Expr::constant(c.powi(*r.numer() as i32));
                }
                if c > 0.0 {
                    return Expr::constant(c.powf(rational_to_f64(r)));
                }
            }
            ExprKind::Pow(b, s) if integral && s.is_integer() => {
                return Expr::pow(b.clone(), r * s);
            }
            ExprKind::Mul(children) if integral => {
                return Expr::product(children.iter().map(|c| Expr::pow(c.clone(), r)));
            }
            ExprKind::Neg(inner) if integral => {
                let p = Expr::pow(inner.clone(), r);
                return if r.numer() % 2 == 0 { p } else { -p };
            }
            _ => {}
        }
        Expr::from_kind(ExprKind::Pow(base, r))
    }

    pub fn powi(base: Expr, n: i64) -> Expr {
        Expr::pow(base, Rational64::from_integer(n))
    }

    pub fn exp(arg: Expr) -> Expr {
        match arg.kind() {
            ExprKind::Constant(c) => Expr::constant(c.exp()),
            _ => Expr::from_kind(ExprKind::Exp(arg)),
        }
    }

    pub fn recip(&self) -> Expr {
        Expr::powi(self.clone(), -1)
    }

    /// `c * self`.
    pub fn scale(&self, c: f64) -> Expr {
        if c == 1.0 {
            return self.clone();
        }
        Expr::product([Expr::constant(c), self.clone()])
    }

    /// Rebuilds the tree through the normalizing constructors: constant
    /// folding, 0/1 identity elimination, flattening of nested sums and
    /// products. Never changes the value away from removable poles.
    pub fn simplify_basic(&self) -> Expr {
        let mut memo: HashMap<usize, Expr> = HashMap::new();
        simplify_rec(self, &mut memo)
    }

    pub fn evaluate(&self, x: f64) -> Result<f64, ExprError> {
        eval::Evaluator::new(x).eval(self)
    }

    /// Spatial derivative of the given order.
    pub fn differentiate(&self, order: u32) -> Expr {
        Differentiator::new().nth(self, order)
    }
}

fn simplify_rec(e: &Expr, memo: &mut HashMap<usize, Expr>) -> Expr {
    if let Some(s) = memo.get(&e.node_id()) {
        return s.clone();
    }
    let out = match e.kind() {
        ExprKind::Constant(_) | ExprKind::Variable(_) => e.clone(),
        ExprKind::Add(c) => Expr::sum(c.iter().map(|c| simplify_rec(c, memo))),
        ExprKind::Mul(c) => Expr::product(c.iter().map(|c| simplify_rec(c, memo))),
        ExprKind::Pow(b, r) => Expr::pow(simplify_rec(b, memo), *r),
        ExprKind::Exp(a) => Expr::exp(simplify_rec(a, memo)),
        ExprKind::Neg(a) => -simplify_rec(a, memo),
    };
    memo.insert(e.node_id(), out.clone());
    out
}

pub(crate) fn rational_to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Splits `c * rest` into its numeric coefficient and the remaining factors.
fn split_coefficient(e: &Expr) -> (f64, Option<Expr>) {
    match e.kind() {
        ExprKind::Constant(c) => (*c, None),
        ExprKind::Mul(children) => {
            let consts: f64 = children.iter().filter_map(|c| c.as_constant()).product();
            let rest: Vec<Expr> = children
                .iter()
                .filter(|c| c.as_constant().is_none())
                .cloned()
                .collect();
            match rest.len() {
                0 => (consts, None),
                1 => (consts, rest.into_iter().next()),
                _ if rest.len() == children.len() => (1.0, Some(e.clone())),
                _ => (consts, Some(Expr::from_kind(ExprKind::Mul(rest)))),
            }
        }
        _ => (1.0, Some(e.clone())),
    }
}

fn with_coefficient(c: f64, rest: Expr) -> Expr {
    if c == 1.0 {
        return rest;
    }
    let mut children = vec![Expr::constant(c)];
    match rest.kind() {
        ExprKind::Mul(fs) => children.extend(fs.iter().cloned()),
        _ => children.push(rest),
    }
    Expr::from_kind(ExprKind::Mul(children))
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::product([Expr::constant(-1.0), self])
    }
}

impl std::ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -self.clone()
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, |$a:ident, $b:ident| $body:expr) => {
        impl std::ops::$trait<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                let ($a, $b) = (self, rhs);
                $body
            }
        }
        impl std::ops::$trait<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                let ($a, $b) = (self.clone(), rhs.clone());
                $body
            }
        }
        impl std::ops::$trait<f64> for Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                let ($a, $b) = (self, Expr::constant(rhs));
                $body
            }
        }
        impl std::ops::$trait<Expr> for f64 {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                let ($a, $b) = (Expr::constant(self), rhs);
                $body
            }
        }
    };
}

binop!(Add, add, |a, b| Expr::sum([a, b]));
binop!(Sub, sub, |a, b| Expr::sum([a, -b]));
binop!(Mul, mul, |a, b| Expr::product([a, b]));
binop!(Div, div, |a, b| Expr::product([a, b.recip()]));

/// Deterministic sample points `lo + (hi - lo) (k + 1/2) / count`.
pub fn sample_points(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| lo + (hi - lo) * (k as f64 + 0.5) / count as f64)
        .collect()
}

/// Numerical identity test: `|a(x) - b(x)| <= tol * (1 + |a(x)|)` at every
/// sample. Points where either side fails to evaluate count as disagreement.
pub fn approx_eq(a: &Expr, b: &Expr, samples: &[f64], tol: f64) -> bool {
    samples
        .iter()
        .all(|&x| match (a.evaluate(x), b.evaluate(x)) {
            (Ok(u), Ok(v)) => (u - v).abs() <= tol * (1.0 + u.abs()),
            _ => false,
        })
}
