use std::fmt;

use super::{Expr, ExprKind};

const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const UNARY: u8 = 3;
const ATOM: u8 = 5;

fn wrap(s: String, prec: u8, min: u8) -> String {
    if prec < min {
        format!("({s})")
    } else {
        s
    }
}

fn number(c: f64) -> (String, u8) {
    if c < 0.0 {
        (format!("-{}", -c), UNARY)
    } else {
        (format!("{c}"), ATOM)
    }
}

/// Negated form of a term that reads naturally after a binary minus.
fn negated_term(e: &Expr) -> Option<Expr> {
    match e.kind() {
        ExprKind::Constant(c) if *c < 0.0 => Some(Expr::constant(-c)),
        ExprKind::Neg(inner) => Some(inner.clone()),
        ExprKind::Mul(children) => match children.first().and_then(|c| c.as_constant()) {
            Some(c) if c < 0.0 => {
                let mut rest = children.clone();
                if c == -1.0 {
                    rest.remove(0);
                } else {
                    rest[0] = Expr::constant(-c);
                }
                Some(match rest.len() {
                    1 => rest.pop().unwrap(),
                    _ => Expr::from_kind(ExprKind::Mul(rest)),
                })
            }
            _ => None,
        },
        _ => None,
    }
}

fn render(e: &Expr) -> (String, u8) {
    match e.kind() {
        ExprKind::Constant(c) => number(*c),
        ExprKind::Variable(name) => (name.to_string(), ATOM),
        ExprKind::Exp(arg) => (format!("exp({})", render(arg).0), ATOM),
        ExprKind::Neg(arg) => {
            let (s, p) = render(arg);
            (format!("-{}", wrap(s, p, PRODUCT)), UNARY)
        }
        ExprKind::Pow(base, r) => {
            let (s, p) = render(base);
            let base = wrap(s, p, ATOM);
            let exp = if r.is_integer() {
                format!("{}", r.numer())
            } else {
                format!("({}/{})", r.numer(), r.denom())
            };
            (format!("{base}^{exp}"), 4)
        }
        ExprKind::Add(children) => {
            let mut out = String::new();
            for (i, c) in children.iter().enumerate() {
                if i > 0 {
                    if let Some(neg) = negated_term(c) {
                        let (s, p) = render(&neg);
                        out.push_str(" - ");
                        out.push_str(&wrap(s, p, PRODUCT));
                        continue;
                    }
                    out.push_str(" + ");
                }
                let (s, p) = render(c);
                out.push_str(&wrap(s, p, SUM + 1));
            }
            (out, SUM)
        }
        ExprKind::Mul(children) => render_product(children),
    }
}

fn render_product(children: &[Expr]) -> (String, u8) {
    let mut coef = 1.0;
    let mut numer: Vec<String> = Vec::new();
    let mut denom: Vec<(String, u8)> = Vec::new();
    for (i, c) in children.iter().enumerate() {
        match c.kind() {
            ExprKind::Constant(k) if i == 0 => coef = *k,
            ExprKind::Pow(base, r) if *r.numer() < 0 => {
                let inv = -*r;
                let (s, p) = if inv.is_integer() && *inv.numer() == 1 {
                    render(base)
                } else {
                    render(&Expr::from_kind(ExprKind::Pow(base.clone(), inv)))
                };
                denom.push((s, p));
            }
            _ => {
                let (s, p) = render(c);
                numer.push(wrap(s, p, UNARY));
            }
        }
    }
    let mut out = String::new();
    let negative = coef < 0.0;
    let mag = coef.abs();
    if negative {
        out.push('-');
    }
    if mag != 1.0 || numer.is_empty() {
        out.push_str(&format!("{mag}"));
        if !numer.is_empty() {
            out.push('*');
        }
    }
    out.push_str(&numer.join("*"));
    if !denom.is_empty() {
        out.push('/');
        if denom.len() == 1 {
            let (s, p) = denom.pop().unwrap();
            out.push_str(&wrap(s, p, 4));
        } else {
            let parts: Vec<String> = denom.into_iter().map(|(s, p)| wrap(s, p, UNARY)).collect();
            out.push_str(&format!("({})", parts.join("*")));
        }
    }
    (out, if negative { UNARY } else { PRODUCT })
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self).0)
    }
}
