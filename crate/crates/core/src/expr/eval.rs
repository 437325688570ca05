//! Exact evaluation at random rational points.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::node::Node;
use super::poly::{Poly, Q};
use super::var::Var;
use super::Expr;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct SampleConfig {
    pub points: usize,
    pub seed: u64,
    /// Attempts per point before giving up on a point that keeps hitting a pole.
    pub max_attempts: usize,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig { points: 20, seed: 0x5eed_0001, max_attempts: 64 }
    }
}

/// Assigns random rationals to indeterminates on first use.
///
/// Exponential atoms are random positive functions of the value of their
/// argument, so `exp(a)` and `exp(b)` agree whenever `a` and `b` do.
pub struct Evaluator {
    rng: ChaCha8Rng,
    vals: HashMap<Var, Q>,
    exp_vals: HashMap<Q, Q>,
    positive: HashSet<String>,
}

impl Evaluator {
    pub fn new(seed: u64) -> Self {
        Evaluator { rng: ChaCha8Rng::seed_from_u64(seed), vals: HashMap::new(), exp_vals: HashMap::new(), positive: HashSet::new() }
    }

    pub fn with_positive<I: IntoIterator<Item = String>>(mut self, names: I) -> Self {
        self.positive.extend(names);
        self
    }

    pub fn fix(&mut self, v: Var, value: Q) {
        self.vals.insert(v, value);
    }

    pub fn random_q(&mut self, positive: bool) -> Q {
        let d: i64 = self.rng.gen_range(1..=17);
        let n: i64 = if positive { self.rng.gen_range(1..=60) } else { self.rng.gen_range(-60..=60) };
        Q::new(BigInt::from(n), BigInt::from(d))
    }

    pub fn value(&mut self, v: &Var) -> Option<Q> {
        if let Var::Exp(arg) = v {
            let a = self.eval_expr(arg)?;
            if let Some(x) = self.exp_vals.get(&a) {
                return Some(x.clone());
            }
            let x = self.random_q(true);
            self.exp_vals.insert(a, x.clone());
            return Some(x);
        }
        if let Some(x) = self.vals.get(v) {
            return Some(x.clone());
        }
        let pos = matches!(v, Var::Sym(s) if self.positive.contains(&**s));
        let x = self.random_q(pos);
        self.vals.insert(v.clone(), x.clone());
        Some(x)
    }

    pub fn eval_poly(&mut self, p: &Poly) -> Option<Q> {
        let mut acc = Q::zero();
        for (m, c) in p.terms() {
            let mut t = c.clone();
            for (v, k) in m.factors() {
                let x = self.value(v)?;
                t *= num_traits::pow(x, *k as usize);
            }
            acc += t;
        }
        Some(acc)
    }

    /// Value of a normalized expression; `None` at a pole.
    pub fn eval_expr(&mut self, e: &Expr) -> Option<Q> {
        let d = self.eval_poly(e.den())?;
        if d.is_zero() {
            return None;
        }
        Some(self.eval_poly(e.num())? / d)
    }

    /// Value of a raw tree; `None` when some quotient has a zero divisor.
    pub fn eval_node(&mut self, n: &Node) -> Option<Q> {
        Some(match n {
            Node::Sum(xs) => {
                let mut acc = Q::zero();
                for x in xs {
                    acc += self.eval_node(x)?;
                }
                acc
            }
            Node::Product(xs) => {
                let mut acc = Q::one();
                for x in xs {
                    acc *= self.eval_node(x)?;
                }
                acc
            }
            Node::Power(b, k) => {
                let b = self.eval_node(b)?;
                if *k < 0 {
                    if b.is_zero() {
                        return None;
                    }
                    num_traits::pow(b.recip(), k.unsigned_abs() as usize)
                } else {
                    num_traits::pow(b, *k as usize)
                }
            }
            Node::Rational(c) => c.clone(),
            Node::Coord(i) => self.value(&Var::coord(*i))?,
            Node::Dep => self.value(&Var::U)?,
            Node::Jet(a) => self.value(&Var::jet(*a))?,
            Node::Symbol(s) => self.value(&Var::sym(s))?,
            Node::Omega(a) => self.value(&Var::Omega(*a))?,
            Node::Exp(a) => {
                self.eval_node(a)?;
                self.eval_expr(&Expr::exp(a.normalize().ok()?))?
            }
        })
    }
}

fn point_seed(cfg: &SampleConfig, point: usize, attempt: usize) -> u64 {
    cfg.seed
        .wrapping_mul(0x9e37_79b9_7f4a_7c15)
        .wrapping_add((point as u64) << 20)
        .wrapping_add(attempt as u64)
}

/// Sampling verdict: `Some(true)` if the tree vanished at every sampled point,
/// `Some(false)` if some point gave a nonzero value, `None` if no point could
/// be evaluated.
pub fn sample_agrees(n: &Node, cfg: &SampleConfig) -> Option<bool> {
    let mut evaluated = 0;
    for point in 0..cfg.points {
        for attempt in 0..cfg.max_attempts {
            let mut ev = Evaluator::new(point_seed(cfg, point, attempt));
            if let Some(v) = ev.eval_node(n) {
                if !v.is_zero() {
                    return Some(false);
                }
                evaluated += 1;
                break;
            }
        }
    }
    if evaluated == 0 {
        None
    } else {
        Some(true)
    }
}

/// Zero test of a raw tree by its normal form, cross-checked by sampling.
pub fn is_zero_checked(n: &Node, cfg: &SampleConfig) -> Result<bool> {
    let canonical = n.normalize()?.is_zero();
    match sample_agrees(n, cfg) {
        Some(s) if s != canonical => Err(Error::Internal(format!(
            "zero test disagreement: normal form says {canonical}, sampling says {s}"
        ))),
        _ => Ok(canonical),
    }
}
