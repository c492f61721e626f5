use std::collections::HashMap;

use super::{Expr, ExprError, ExprKind, SPATIAL_VAR};

const SUBTREE_PREVIEW: usize = 160;

/// Point evaluator. Nodes referenced from more than one parent are cached so
/// that evaluating a shared DAG costs one visit per distinct node.
pub(crate) struct Evaluator {
    x: f64,
    memo: HashMap<usize, f64>,
}

fn domain_error(e: &Expr, reason: impl Into<String>) -> ExprError {
    let mut subtree = e.to_string();
    if subtree.len() > SUBTREE_PREVIEW {
        let mut cut = SUBTREE_PREVIEW;
        while !subtree.is_char_boundary(cut) {
            cut -= 1;
        }
        subtree.truncate(cut);
        subtree.push_str("...");
    }
    ExprError::Domain {
        subtree,
        reason: reason.into(),
    }
}

impl Evaluator {
    pub(crate) fn new(x: f64) -> Self {
        Evaluator {
            x,
            memo: HashMap::new(),
        }
    }

    pub(crate) fn eval(&mut self, e: &Expr) -> Result<f64, ExprError> {
        let shared = e.is_shared();
        if shared {
            if let Some(v) = self.memo.get(&e.node_id()) {
                return Ok(*v);
            }
        }
        let v = match e.kind() {
            ExprKind::Constant(c) => *c,
            ExprKind::Variable(name) => {
                if &**name == SPATIAL_VAR {
                    self.x
                } else {
                    return Err(ExprError::UnboundVariable(name.to_string()));
                }
            }
            ExprKind::Add(children) => {
                let mut acc = 0.0;
                for c in children {
                    acc += self.eval(c)?;
                }
                acc
            }
            ExprKind::Mul(children) => {
                let mut acc = 1.0;
                for c in children {
                    acc *= self.eval(c)?;
                }
                acc
            }
            ExprKind::Pow(base, r) => {
                let b = self.eval(base)?;
                let (p, q) = (*r.numer(), *r.denom());
                if b == 0.0 && p < 0 {
                    return Err(domain_error(e, "zero raised to a negative power"));
                }
                if q == 1 {
                    if let Ok(p32) = i32::try_from(p) {
                        b.powi(p32)
                    } else {
                        b.powf(p as f64)
                    }
                } else if b < 0.0 {
                    if q % 2 == 0 {
                        return Err(domain_error(e, "even root of a negative number"));
                    }
                    let mag = (-b).powf(p as f64 / q as f64);
                    if p % 2 == 0 {
                        mag
                    } else {
                        -mag
                    }
                } else {
                    b.powf(p as f64 / q as f64)
                }
            }
            ExprKind::Exp(arg) => self.eval(arg)?.exp(),
            ExprKind::Neg(arg) => -self.eval(arg)?,
        };
        if !v.is_finite() {
            return Err(domain_error(e, "non-finite value"));
        }
        if shared {
            self.memo.insert(e.node_id(), v);
        }
        Ok(v)
    }
}
