//! Seeded random instances for property tests, benches and acceptance runs.

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classify2::{Kind, QuasiLinear2};
use crate::error::Result;
use crate::expr::{q2, Expr, MultiIndex, Node, Var};
use crate::jet::{JetContext, Split};
use crate::vfmod::{phi_family_member, pushforward, CanonicalModule, PhiVariant, PointMap, VFModule, VectorField};

pub struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    pub fn nonzero_int(&mut self, m: i64) -> i64 {
        loop {
            let k = self.int(-m, m);
            if k != 0 {
                return k;
            }
        }
    }

    pub fn coin(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    fn coeff(&mut self) -> Expr {
        let n = self.nonzero_int(5);
        let d = if self.coin(0.25) { self.int(2, 3) } else { 1 };
        Expr::rational(q2(n, d))
    }

    /// Sum of `terms` random monomials of degree at most `deg` in `vars`.
    pub fn poly(&mut self, vars: &[Expr], terms: usize, deg: u32) -> Expr {
        let mut out = Expr::zero();
        for _ in 0..terms {
            let mut t = self.coeff();
            let d = self.rng.gen_range(0..=deg);
            for _ in 0..d {
                if let Some(v) = vars.choose(&mut self.rng) {
                    t = t * v;
                }
            }
            out = out + t;
        }
        out
    }

    fn coords(n: usize) -> Vec<Expr> {
        (0..n).map(Expr::coord).collect()
    }

    /// Random tree over `x_0..x_{n-1}`, `u`, first- and second-order jets,
    /// exp and division by expressions that never vanish identically.
    pub fn node(&mut self, n: usize, depth: u32) -> Node {
        if depth == 0 || self.coin(0.25) {
            return self.leaf(n);
        }
        match self.rng.gen_range(0..10) {
            0..=2 => {
                let k = self.rng.gen_range(2..=3);
                Node::Sum((0..k).map(|_| self.node(n, depth - 1)).collect())
            }
            3..=5 => {
                let k = self.rng.gen_range(2..=3);
                Node::Product((0..k).map(|_| self.node(n, depth - 1)).collect())
            }
            6 => Node::Power(Box::new(self.node(n, depth - 1)), self.int(2, 3)),
            7 => Node::Power(Box::new(self.safe_denominator(n)), -self.int(1, 2)),
            8 => Node::Exp(Box::new(self.node(n, depth.min(2) - 1))),
            _ => Node::Product(vec![self.node(n, depth - 1), Node::Power(Box::new(self.safe_denominator(n)), -1)]),
        }
    }

    fn leaf(&mut self, n: usize) -> Node {
        match self.rng.gen_range(0..6) {
            0 => Node::Rational(q2(self.int(-6, 6), self.int(1, 4))),
            1 | 2 => Node::Coord(self.rng.gen_range(0..n)),
            3 => Node::Dep,
            _ => {
                let order = self.rng.gen_range(1..=2);
                let mut e = vec![0u32; n];
                for _ in 0..order {
                    e[self.rng.gen_range(0..n)] += 1;
                }
                Node::Jet(MultiIndex::new(&e))
            }
        }
    }

    /// `c + Σ v_k^2` with `c > 0`: positive at every rational point.
    fn safe_denominator(&mut self, n: usize) -> Node {
        let mut parts = vec![Node::int(self.int(1, 3))];
        for _ in 0..self.rng.gen_range(1..=2) {
            parts.push(Node::Power(Box::new(self.leaf_var(n)), 2));
        }
        Node::Sum(parts)
    }

    fn leaf_var(&mut self, n: usize) -> Node {
        loop {
            let l = self.leaf(n);
            if !matches!(l, Node::Rational(_)) {
                return l;
            }
        }
    }

    /// A rewritten copy of `t` equal to it as a function.
    pub fn rewrite(&mut self, t: &Node, n: usize) -> Node {
        match t {
            Node::Sum(xs) => {
                let mut ys: Vec<Node> = xs.iter().map(|x| self.rewrite(x, n)).collect();
                ys.shuffle(&mut self.rng);
                Node::Sum(ys)
            }
            Node::Product(xs) => {
                let mut ys: Vec<Node> = xs.iter().map(|x| self.rewrite(x, n)).collect();
                ys.shuffle(&mut self.rng);
                if let Some(pos) = ys.iter().position(|y| matches!(y, Node::Sum(_))) {
                    if self.coin(0.5) {
                        let Node::Sum(parts) = ys.remove(pos) else { unreachable!() };
                        let rest = ys;
                        return Node::Sum(
                            parts
                                .into_iter()
                                .map(|p| {
                                    let mut f = rest.clone();
                                    f.push(p);
                                    Node::Product(f)
                                })
                                .collect(),
                        );
                    }
                }
                Node::Product(ys)
            }
            Node::Power(b, k) if *k >= 2 && self.coin(0.5) => {
                let b = self.rewrite(b, n);
                Node::Product(vec![b; *k as usize])
            }
            Node::Power(b, k) => Node::Power(Box::new(self.rewrite(b, n)), *k),
            Node::Exp(a) => match a.as_ref() {
                Node::Sum(parts) if self.coin(0.6) => {
                    Node::Product(parts.iter().map(|p| Node::Exp(Box::new(self.rewrite(p, n)))).collect())
                }
                _ => Node::Exp(Box::new(self.rewrite(a, n))),
            },
            leaf => {
                if self.coin(0.15) {
                    let d = self.safe_denominator(n);
                    Node::Product(vec![leaf.clone(), d.clone(), Node::Power(Box::new(d), -1)])
                } else {
                    leaf.clone()
                }
            }
        }
    }

    /// `t − rewrite(t)`, identically zero, or a perturbed difference that is
    /// not, with probability one half each.
    pub fn zero_test_case(&mut self, n: usize, depth: u32) -> Node {
        let t = self.node(n, depth);
        let mut t2 = self.rewrite(&t, n);
        if self.coin(0.5) {
            let bump = self.leaf_var(n);
            t2 = Node::Sum(vec![t2, Node::Product(vec![Node::int(self.nonzero_int(3)), bump])]);
        }
        Node::Sum(vec![t, Node::Product(vec![Node::int(-1), t2])])
    }

    /// Polynomial right-hand side `H` of order exactly `order` in the spatial
    /// slots `1..=n_spatial` of a context with time.
    pub fn evolution_h(&mut self, n_spatial: usize, order: u32) -> Expr {
        let n = n_spatial + 1;
        let mut jets = vec![Expr::u()];
        for k in 1..=order {
            for a in MultiIndex::all_of_order(n_spatial, k) {
                let mut e = vec![0u32];
                e.extend(a.entries());
                jets.push(Expr::jet(MultiIndex::new(&e)));
            }
        }
        let top: Vec<Expr> = jets.iter().filter(|j| crate::jet::order_of(j) == order as i32).cloned().collect();
        let base = Self::coords(n);
        let lead = top.choose(&mut self.rng).expect("top-order jets").clone();
        let mut h = lead * (self.coeff() + self.poly(&base, 1, 1));
        if self.coin(0.5) {
            let t2 = top.choose(&mut self.rng).expect("top-order jets").clone();
            h = h + t2 * self.poly(&jets[..jets.len().min(1 + n_spatial)], 1, 1);
        }
        let mut vars = base.clone();
        vars.extend(jets.iter().cloned());
        let k = self.rng.gen_range(1..=3);
        let h = h + self.poly(&vars, k, 2);
        if crate::jet::order_of(&h) == order as i32 {
            h
        } else {
            self.evolution_h(n_spatial, order)
        }
    }

    /// Random jet monomial of order exactly `k` over `n` slots.
    pub fn jet_of_order(&mut self, n: usize, k: u32) -> Expr {
        let all = MultiIndex::all_of_order(n, k);
        Expr::jet(*all.choose(&mut self.rng).expect("nonempty"))
    }

    /// Polynomial in `x`, `u` and jets of order `1..=r`, of order exactly `r`.
    pub fn jet_function(&mut self, n: usize, r: u32) -> Expr {
        loop {
            let mut vars = Self::coords(n);
            vars.push(Expr::u());
            for k in 1..=r {
                vars.push(self.jet_of_order(n, k));
            }
            let top = self.jet_of_order(n, r);
            let f = top * (self.coeff() + self.poly(&vars, 1, 1)) + self.poly(&vars, 3, 2);
            if crate::jet::order_of(&f) == r as i32 {
                return f;
            }
        }
    }

    /// Polynomial in `x`, `u` and jets `u_α` with `|α| <= r` and hat weight
    /// at most `k`, depending on some jet of hat weight exactly `k`.
    pub fn omega_function(&mut self, split: &Split, r: u32, k: u32) -> Expr {
        let n = split.n;
        let pool: Vec<MultiIndex> =
            MultiIndex::all_up_to(n, 0, r).into_iter().filter(|a| split.hat_weight(a) <= k).collect();
        let top: Vec<MultiIndex> = pool.iter().filter(|a| split.hat_weight(a) == k).cloned().collect();
        loop {
            let mut vars = Self::coords(n);
            for _ in 0..4 {
                vars.push(Expr::jet(*pool.choose(&mut self.rng).expect("nonempty")));
            }
            let lead = Expr::jet(*top.choose(&mut self.rng).expect("hat weight k is reachable"));
            let f = lead * (self.coeff() + self.poly(&vars, 1, 1)) + self.poly(&vars, 2, 2);
            let hit = f.all_vars().iter().any(|v| match v {
                Var::Jet(a) => split.hat_weight(a) == k,
                _ => false,
            });
            if hit {
                return f;
            }
        }
    }

    /// `Φ(x, u)` over `n` coordinates with `Φ_u ≢ 0`.
    pub fn phi(&mut self, n: usize) -> Expr {
        let base = Self::coords(n);
        loop {
            let u = Expr::u();
            let a1 = self.coeff() + self.poly(&base, 1, 1);
            let a0 = self.poly(&base, 2, 2);
            let mut num = &a1 * &u + a0;
            if self.coin(0.3) {
                num = num + self.coeff() * &u * &u;
            }
            let phi = match self.rng.gen_range(0..3) {
                0 => num,
                1 => {
                    let lin = self.poly(&base, 2, 1);
                    num * Expr::exp(lin)
                }
                _ => {
                    let v = base.choose(&mut self.rng).expect("coordinates").clone();
                    num / (Expr::int(self.int(1, 3)) + &v * &v)
                }
            };
            if !phi.diff(&Var::U).is_zero() {
                return phi;
            }
        }
    }

    /// `x̃_i = x_i + f_i(x_0..x_{i-1})`, `ũ = u + g(x)`, with its inverse.
    pub fn triangular_map(&mut self, n: usize) -> PointMap {
        self.triangular_map_deg(n, 2)
    }

    /// Triangular map whose `f_i` have degree at most `deg`; `deg = 1` gives
    /// an affine map.
    pub fn triangular_map_deg(&mut self, n: usize, deg: u32) -> PointMap {
        let base = Self::coords(n);
        let mut x = Vec::new();
        for i in 0..n {
            let f = if i == 0 { self.poly(&[], 1, 0) } else { self.poly(&base[..i], 2, deg) };
            x.push(&base[i] + &f);
        }
        let g = self.poly(&base, 2, 1);
        let u = Expr::u() + &g;
        let mut xinv: Vec<Expr> = Vec::new();
        for i in 0..n {
            let f = &x[i] - &base[i];
            let mut b = std::collections::HashMap::new();
            for (j, e) in xinv.iter().enumerate() {
                b.insert(Var::coord(j), e.clone());
            }
            let fi = f.substitute(&b).expect("polynomial substitution");
            xinv.push(&base[i] - &fi);
        }
        let mut b = std::collections::HashMap::new();
        for (j, e) in xinv.iter().enumerate() {
            b.insert(Var::coord(j), e.clone());
        }
        let uinv = Expr::u() - g.substitute(&b).expect("polynomial substitution");
        PointMap { x, u, inverse: Some((xinv, uinv)) }
    }

    /// Involutive module with the rank condition: a `Φ` family over the
    /// first `p` slots pushed forward by a triangular map.
    pub fn involutive_module(&mut self, n: usize, p: usize) -> Result<VFModule> {
        let phi = self.phi(n);
        let m = phi_family_member(&phi, &Split::prefix(n, p), &PhiVariant::Involutive)?;
        let map = self.triangular_map(n);
        let basis: Result<Vec<VectorField>> = m.basis().iter().map(|v| pushforward(v, &map)).collect();
        VFModule::new(basis?, n)
    }

    pub fn involutive_canonical(&mut self, n: usize, p: usize) -> Result<CanonicalModule> {
        loop {
            let m = self.involutive_module(n, p)?;
            if m.rank_condition() {
                return m.canonical_basis();
            }
        }
    }

    /// One-dimensional module `ξ^i ∂_i + η ∂_u` with `ξ ≠ 0`.
    pub fn line_module(&mut self, n: usize) -> VFModule {
        let base = Self::coords(n);
        let mut vars = base.clone();
        vars.push(Expr::u());
        loop {
            let xi: Vec<Expr> = (0..n)
                .map(|_| if self.coin(0.5) { Expr::int(self.int(-2, 2)) } else { self.poly(&vars, 1, 1) })
                .collect();
            if xi.iter().all(Expr::is_zero) {
                continue;
            }
            let eta = self.poly(&vars, 2, 2);
            if let Ok(m) = VFModule::new(vec![VectorField { xi, eta }], n) {
                return m;
            }
        }
    }

    /// `a = I + B Bᵀ` with `B` of small polynomials in `(x, u, u_(1))`.
    pub fn elliptic(&mut self, n: usize, ctx: &JetContext) -> Result<QuasiLinear2> {
        let mut vars = Self::coords(n);
        vars.push(Expr::u());
        for i in 0..n {
            vars.push(Expr::jet(ctx.delta(i)));
        }
        let b: Vec<Vec<Expr>> = (0..n)
            .map(|_| (0..n).map(|_| if self.coin(0.5) { Expr::zero() } else { self.poly(&vars, 1, 1) }).collect())
            .collect();
        let mut a = vec![vec![Expr::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = if i == j { Expr::one() } else { Expr::zero() };
                for k in 0..n {
                    s = s + &b[i][k] * &b[j][k];
                }
                a[i][j] = s;
            }
        }
        let rhs = self.poly(&vars, 2, 2);
        let seed = self.rng.gen();
        QuasiLinear2::new(Kind::Elliptic, a, rhs, ctx)?.with_positivity(10, seed, ctx)
    }

    /// Admissible module of dimension below `n` for elliptic tests.
    pub fn elliptic_module(&mut self, n: usize) -> Result<VFModule> {
        if n >= 3 && self.coin(0.4) {
            self.involutive_module(n, n - 1)
        } else if self.coin(0.5) {
            Ok(self.line_module(n))
        } else {
            self.involutive_module(n, 1)
        }
    }
}

/// `x_i ↦ x̃_i` helper for tests: whether the map composed with its inverse
/// is the identity.
pub fn map_round_trips(map: &PointMap) -> bool {
    let Some((xinv, uinv)) = &map.inverse else { return false };
    let mut b = std::collections::HashMap::new();
    for (j, e) in xinv.iter().enumerate() {
        b.insert(Var::coord(j), e.clone());
    }
    b.insert(Var::U, uinv.clone());
    map.x.iter().enumerate().all(|(i, x)| x.substitute(&b).map(|e| (e - Expr::coord(i)).is_zero()).unwrap_or(false))
        && map.u.substitute(&b).map(|e| (e - Expr::u()).is_zero()).unwrap_or(false)
}

/// Zero of the rational numbers, for callers comparing sampled values.
pub fn is_rational_zero(q: &crate::expr::Q) -> bool {
    q.is_zero()
}
