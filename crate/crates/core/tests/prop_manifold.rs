use proptest::prelude::*;

use redmod_core::gen::Gen;
use redmod_core::jet::{order_of, JetContext, Split};
use redmod_core::manifold::{
    family_reduced_function, meta_singularity_coorder, strong_coorder, weak_coorder, ElimChoice, MetaVariant,
    RewriteSystem,
};
use redmod_core::vfmod::{phi_family_member, PhiVariant, VFModule};
use redmod_core::Expr;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn elimination_order_does_not_matter(seed in any::<u64>()) {
        let ctx = JetContext::new(3);
        let c = Gen::new(seed).involutive_canonical(3, 2).unwrap();
        let a = RewriteSystem::build(&c, 3, ElimChoice::First, &ctx).unwrap();
        let b = RewriteSystem::build(&c, 3, ElimChoice::Last, &ctx).unwrap();
        prop_assert_eq!(a.rules.len(), b.rules.len());
        for (k, e) in &a.rules {
            prop_assert!((e - &b.rules[k]).is_zero(), "{:?}", k);
        }
    }

    #[test]
    fn weak_coorder_bounded_by_strong(seed in any::<u64>()) {
        let ctx = JetContext::new(3);
        let mut g = Gen::new(seed);
        let l = g.jet_function(3, 2) * Expr::exp(Expr::coord(0));
        let m = g.involutive_module(3, 2).unwrap();
        let rep = weak_coorder(&l, &m, &ctx).unwrap();
        let weak = rep.weak_coorder.unwrap();
        prop_assert!(weak <= rep.strong_coorder);
        if rep.weak_multiplier.as_ref().and_then(Expr::as_constant).is_some() {
            prop_assert_eq!(weak, rep.strong_coorder);
        }
    }
}

#[test]
fn larger_modules_do_not_raise_the_coorder() {
    let ctx = JetContext::new(3);
    let mut g = Gen::new(11);
    for k in 0..50 {
        let phi = g.phi(3);
        let q = phi_family_member(&phi, &Split::prefix(3, 2), &PhiVariant::Involutive).unwrap();
        let sub = VFModule::new(vec![q.basis()[k % 2].clone()], 3).unwrap();
        let l = g.jet_function(3, 1 + (k % 2) as u32);
        let big = strong_coorder(&l, &q, &ctx).unwrap().strong_coorder;
        let small = strong_coorder(&l, &sub, &ctx).unwrap().strong_coorder;
        assert!(big <= small, "L = {}, Φ = {}: {big} > {small}", ctx.show(&l), ctx.show(&phi));
    }
}

#[test]
fn no_meta_singular_module_of_coorder_minus_one() {
    let ctx = JetContext::new(3);
    let mut g = Gen::new(12);
    for k in 0..40 {
        let l = g.jet_function(3, 1 + (k % 3) as u32);
        for p in 1..=2 {
            let rep = meta_singularity_coorder(&l, &Split::prefix(3, p), &MetaVariant::Involutive, &ctx).unwrap();
            assert!(rep.coorder >= 0, "{}", ctx.show(&l));
        }
    }
}

#[test]
fn meta_coorder_recovers_hat_weight() {
    let ctx = JetContext::new(3);
    let split = Split::prefix(3, 2);
    let mut g = Gen::new(13);
    for k in 0..=2u32 {
        for _ in 0..5 {
            let l = g.omega_function(&split, 3, k);
            let rep = meta_singularity_coorder(&l, &split, &MetaVariant::Involutive, &ctx).unwrap();
            assert_eq!(rep.coorder, k as i32, "{}", ctx.show(&l));
            let mut hit = false;
            for _ in 0..20 {
                let phi = g.phi(3);
                let f = family_reduced_function(&l, &phi, &split, k as i32, &MetaVariant::Involutive, &ctx).unwrap();
                let o = order_of(&f);
                assert!(o <= k as i32);
                hit |= o == k as i32;
            }
            assert!(hit, "no family member reached order {k} for {}", ctx.show(&l));
        }
    }
}
