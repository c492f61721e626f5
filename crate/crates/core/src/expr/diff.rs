use std::collections::HashMap;

use num_rational::Rational64;

use super::{Expr, ExprKind, SPATIAL_VAR};

/// Memoizing d/dx. Reusing one instance across many related expressions
/// (the terms of a series and their successive derivatives) keeps the
/// derivative DAGs shared.
#[derive(Default)]
pub struct Differentiator {
    // keyed by node address; the source node is kept alive alongside
    memo: HashMap<usize, (Expr, Expr)>,
}

impl Differentiator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn nth(&mut self, e: &Expr, order: u32) -> Expr {
        let mut out = e.clone();
        for _ in 0..order {
            out = self.d(&out);
        }
        out
    }

    pub fn d(&mut self, e: &Expr) -> Expr {
        if let Some((_, d)) = self.memo.get(&e.node_id()) {
            return d.clone();
        }
        let out = match e.kind() {
            ExprKind::Constant(_) => Expr::zero(),
            ExprKind::Variable(name) => {
                if &**name == SPATIAL_VAR {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            ExprKind::Add(children) => {
                let parts: Vec<Expr> = children.iter().map(|c| self.d(c)).collect();
                Expr::sum(parts)
            }
            ExprKind::Mul(children) => {
                let mut terms = Vec::with_capacity(children.len());
                for (i, ci) in children.iter().enumerate() {
                    let dci = self.d(ci);
                    if dci.is_zero() {
                        continue;
                    }
                    let mut factors = Vec::with_capacity(children.len());
                    for (j, cj) in children.iter().enumerate() {
                        factors.push(if i == j { dci.clone() } else { cj.clone() });
                    }
                    terms.push(Expr::product(factors));
                }
                Expr::sum(terms)
            }
            ExprKind::Pow(base, r) => {
                let db = self.d(base);
                if db.is_zero() {
                    Expr::zero()
                } else {
                    let r = *r;
                    let coef = *r.numer() as f64 / *r.denom() as f64;
                    Expr::product([
                        Expr::constant(coef),
                        Expr::pow(base.clone(), r - Rational64::from_integer(1)),
                        db,
                    ])
                }
            }
            ExprKind::Exp(arg) => {
                let da = self.d(arg);
                Expr::product([e.clone(), da])
            }
            ExprKind::Neg(arg) => -self.d(arg),
        };
        self.memo.insert(e.node_id(), (e.clone(), out.clone()));
        out
    }
}
