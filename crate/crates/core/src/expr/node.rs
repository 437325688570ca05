use num_traits::{One, Zero};

use super::poly::{Poly, Q};
use super::var::{MultiIndex, Var};
use super::Expr;
use crate::error::{Error, Result};

/// Expression tree, as produced by the parser or by [`Expr::to_node`].
#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Sum(Vec<Node>),
    Product(Vec<Node>),
    Power(Box<Node>, i64),
    Rational(Q),
    Coord(usize),
    Dep,
    Jet(MultiIndex),
    Exp(Box<Node>),
    Symbol(String),
    Omega(MultiIndex),
}

impl Node {
    pub fn int(n: i64) -> Node {
        Node::Rational(super::q(n))
    }

    /// Normal form of the tree.
    pub fn normalize(&self) -> Result<Expr> {
        Ok(match self {
            Node::Sum(xs) => {
                let mut acc = Expr::zero();
                for x in xs {
                    acc = acc + x.normalize()?;
                }
                acc
            }
            Node::Product(xs) => {
                let mut acc = Expr::one();
                for x in xs {
                    acc = acc * x.normalize()?;
                }
                acc
            }
            Node::Power(b, k) => {
                let b = b.normalize()?;
                if *k < 0 && b.is_zero() {
                    return Err(Error::SingularSubstitution("division by zero".into()));
                }
                b.pow(*k)
            }
            Node::Rational(c) => Expr::rational(c.clone()),
            Node::Coord(i) => Expr::coord(*i),
            Node::Dep => Expr::u(),
            Node::Jet(a) => Expr::jet(*a),
            Node::Exp(a) => Expr::exp(a.normalize()?),
            Node::Symbol(s) => Expr::sym(s),
            Node::Omega(a) => Expr::var(Var::Omega(*a)),
        })
    }

    /// Number of nodes in the tree.
    pub fn count(&self) -> usize {
        match self {
            Node::Sum(xs) | Node::Product(xs) => 1 + xs.iter().map(Node::count).sum::<usize>(),
            Node::Power(b, _) | Node::Exp(b) => 1 + b.count(),
            _ => 1,
        }
    }
}

pub(super) fn var_node(v: &Var) -> Node {
    match v {
        Var::Coord(i) => Node::Coord(*i as usize),
        Var::U => Node::Dep,
        Var::Jet(a) => Node::Jet(*a),
        Var::Sym(s) => Node::Symbol(s.to_string()),
        Var::Exp(a) => Node::Exp(Box::new(from_expr(a))),
        Var::Omega(a) => Node::Omega(*a),
    }
}

fn poly_node(p: &Poly) -> Node {
    let mut terms = Vec::with_capacity(p.len());
    for (m, c) in p.terms() {
        let mut factors = Vec::new();
        if !c.is_one() || m.is_one() {
            factors.push(Node::Rational(c.clone()));
        }
        for (v, k) in m.factors().iter().rev() {
            let b = var_node(v);
            factors.push(if *k == 1 { b } else { Node::Power(Box::new(b), *k as i64) });
        }
        terms.push(if factors.len() == 1 { factors.pop().unwrap() } else { Node::Product(factors) });
    }
    match terms.len() {
        0 => Node::Rational(Q::zero()),
        1 => terms.pop().unwrap(),
        _ => Node::Sum(terms),
    }
}

pub(super) fn from_expr(e: &Expr) -> Node {
    let n = poly_node(e.num());
    if e.den().is_one() {
        return n;
    }
    let d = Node::Power(Box::new(poly_node(e.den())), -1);
    match n {
        Node::Rational(c) if c.is_one() => d,
        Node::Product(mut xs) => {
            xs.push(d);
            Node::Product(xs)
        }
        other => Node::Product(vec![other, d]),
    }
}
