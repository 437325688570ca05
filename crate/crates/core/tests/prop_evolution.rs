use proptest::prelude::*;

use redmod_core::evolution::{phi_residual_evolution, tilde_extension, EvolutionEquation};
use redmod_core::gen::Gen;
use redmod_core::jet::{JetContext, Split};
use redmod_core::reduction::conditional_invariance_check;
use redmod_core::vfmod::{phi_etas, phi_family_member, PhiVariant};
use redmod_core::{Expr, MultiIndex};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn phi_identity_holds(seed in any::<u64>(), two in any::<bool>()) {
        let ns = if two { 2 } else { 1 };
        let ctx = JetContext::with_time(ns);
        let mut g = Gen::new(seed);
        let e = EvolutionEquation::new(g.evolution_h(ns, 2), &ctx).unwrap();
        let phi = g.phi(ns + 1);
        let r = phi_residual_evolution(&e, &phi, &ctx).unwrap();
        prop_assert!(r.identity_holds(), "H = {}, Φ = {}", ctx.show(&e.h), ctx.show(&phi));
    }
}

/// `exp(k x + (a k² + b k + c) t)` solves `u_t = a u_xx + b u_x + c u`.
fn exp_solution(k: i64, a: i64, b: i64, c: i64) -> Expr {
    let lambda = a * k * k + b * k + c;
    Expr::exp(Expr::int(k) * Expr::coord(1) + Expr::int(lambda) * Expr::coord(0))
}

#[test]
fn linear_families_give_reduction_modules() {
    let ctx = JetContext::with_time(1);
    let mut g = Gen::new(31);
    let split = Split::from_checked(2, &[1]);
    for _ in 0..25 {
        let (a, b, c) = (g.nonzero_int(3), g.int(-3, 3), g.int(-3, 3));
        let h = Expr::int(a) * Expr::jet(MultiIndex::new(&[0, 2])) + Expr::int(b) * Expr::jet(MultiIndex::new(&[0, 1])) + Expr::int(c) * Expr::u();
        let e = EvolutionEquation::new(h, &ctx).unwrap();
        let k1 = g.nonzero_int(3);
        let mut k2 = g.int(-3, 3);
        if k2 == k1 {
            k2 += 1;
        }
        let gs = exp_solution(k1, a, b, c);
        let hs = Expr::int(g.nonzero_int(4)) * exp_solution(k2, a, b, c);
        let phi = (Expr::u() - &hs) / &gs;
        let r = phi_residual_evolution(&e, &phi, &ctx).unwrap();
        assert!(r.is_reduction_module(), "Φ = {}: residual {}", ctx.show(&phi), ctx.show(&r.residual));
        let m = phi_family_member(&phi, &split, &PhiVariant::Involutive).unwrap();
        let v = conditional_invariance_check(&e.equation(&ctx), &m, &ctx).unwrap();
        assert_eq!(v.is_reduction_module, Some(true), "Φ = {}", ctx.show(&phi));
        let t = tilde_extension(&e, &r.etas, &ctx).unwrap();
        assert!(t.agree() && t.reduction, "Φ = {}", ctx.show(&phi));
    }
}

#[test]
fn tilde_extension_verdicts_agree() {
    let mut g = Gen::new(32);
    let mut positive = 0;
    for k in 0..25 {
        let ns = 1 + k % 2;
        let ctx = JetContext::with_time(ns);
        let e = EvolutionEquation::new(g.evolution_h(ns, 2), &ctx).unwrap();
        let etas = if k % 5 == 0 {
            vec![Expr::zero(); ns]
        } else {
            phi_etas(&g.phi(ns + 1), &e.spatial()).unwrap()
        };
        let t = tilde_extension(&e, &etas, &ctx).unwrap();
        assert!(t.agree(), "H = {}, η = {:?}", ctx.show(&e.h), etas.iter().map(|x| ctx.show(x)).collect::<Vec<_>>());
        positive += t.reduction as usize;
    }
    assert!(positive < 25);
}
