use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use super::Expr;

/// Largest supported number of independent variables.
pub const MAX_VARS: usize = 8;

/// Derivative multi-index `α = (α_1, …, α_n)`.
///
/// Ordered graded-lexicographically: first by `|α|`, then by the entries
/// from left to right.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    len: u8,
    e: [u8; MAX_VARS],
}

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        assert!(n <= MAX_VARS, "at most {MAX_VARS} independent variables");
        MultiIndex { len: n as u8, e: [0; MAX_VARS] }
    }

    pub fn new(entries: &[u32]) -> Self {
        let mut m = Self::zero(entries.len());
        for (i, &a) in entries.iter().enumerate() {
            assert!(a <= u8::MAX as u32, "multi-index entry too large");
            m.e[i] = a as u8;
        }
        m
    }

    /// `δ_i` in `n` variables.
    pub fn delta(n: usize, i: usize) -> Self {
        let mut m = Self::zero(n);
        m.e[i] = 1;
        m
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> u32 {
        self.e[i] as u32
    }

    pub fn entries(&self) -> Vec<u32> {
        self.e[..self.len()].iter().map(|&a| a as u32).collect()
    }

    /// `|α|`
    pub fn order(&self) -> u32 {
        self.e[..self.len()].iter().map(|&a| a as u32).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.order() == 0
    }

    pub fn add_delta(&self, i: usize) -> Self {
        let mut m = *self;
        m.e[i] += 1;
        m
    }

    pub fn sub_delta(&self, i: usize) -> Option<Self> {
        if self.e[i] == 0 {
            return None;
        }
        let mut m = *self;
        m.e[i] -= 1;
        Some(m)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut m = *self;
        for i in 0..self.len() {
            m.e[i] += other.e[i];
        }
        m
    }

    /// Sum of the entries at the given slots.
    pub fn weight(&self, slots: &[usize]) -> u32 {
        slots.iter().map(|&i| self.e[i] as u32).sum()
    }

    /// Copy of `self` with the given slots set to zero.
    pub fn without(&self, slots: &[usize]) -> Self {
        let mut m = *self;
        for &i in slots {
            m.e[i] = 0;
        }
        m
    }

    /// All multi-indices in `n` variables with `|α| = k`, in increasing order.
    pub fn all_of_order(n: usize, k: u32) -> Vec<Self> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; n];
        fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            let n = cur.len();
            if i + 1 == n {
                cur[i] = left;
                out.push(MultiIndex::new(cur));
                return;
            }
            for a in 0..=left {
                cur[i] = a;
                rec(i + 1, left - a, cur, out);
            }
        }
        if n == 0 {
            if k == 0 {
                out.push(Self::zero(0));
            }
            return out;
        }
        rec(0, k, &mut cur, &mut out);
        out.sort();
        out
    }

    /// All multi-indices in `n` variables with `lo ≤ |α| ≤ hi`, in increasing order.
    pub fn all_up_to(n: usize, lo: u32, hi: u32) -> Vec<Self> {
        (lo..=hi).flat_map(|k| Self::all_of_order(n, k)).collect()
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order()
            .cmp(&other.order())
            .then_with(|| self.e[..self.len()].cmp(&other.e[..other.len()]))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.len() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", self.e[i])?;
        }
        write!(f, "]")
    }
}

/// An indeterminate of the polynomial ring underlying [`Expr`].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    /// Independent variable, 0-based slot.
    Coord(u8),
    /// The dependent variable `u`.
    U,
    /// `u_α` with `|α| > 0`.
    Jet(MultiIndex),
    /// User parameter.
    Sym(Arc<str>),
    /// Opaque positive atom `exp(arg)` with a normalized argument.
    Exp(Arc<Expr>),
    /// Auxiliary jet coordinate used by changes of jet variables.
    Omega(MultiIndex),
}

impl Var {
    pub fn coord(i: usize) -> Self {
        assert!(i < MAX_VARS);
        Var::Coord(i as u8)
    }

    /// `u_α`, collapsing the zero index to `u`.
    pub fn jet(alpha: MultiIndex) -> Self {
        if alpha.is_zero() {
            Var::U
        } else {
            Var::Jet(alpha)
        }
    }

    pub fn sym(name: &str) -> Self {
        Var::Sym(Arc::from(name))
    }

    /// Multi-index of a jet variable; `u` has the zero index.
    pub fn jet_index(&self, n: usize) -> Option<MultiIndex> {
        match self {
            Var::U => Some(MultiIndex::zero(n)),
            Var::Jet(a) => Some(*a),
            _ => None,
        }
    }

    pub fn is_exp(&self) -> bool {
        matches!(self, Var::Exp(_))
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Coord(i) => write!(f, "x{}", i + 1),
            Var::U => write!(f, "u"),
            Var::Jet(a) => write!(f, "u{a}"),
            Var::Sym(s) => write!(f, "{s}"),
            Var::Exp(a) => write!(f, "exp({a})"),
            Var::Omega(a) => write!(f, "w{a}"),
        }
    }
}
