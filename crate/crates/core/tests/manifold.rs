use redmod_core::expr::Var;
use redmod_core::jet::{hat_order, order_of, JetContext, Split};
use redmod_core::manifold::{
    build_rewrites, family_reduced_function, meta_singularity_coorder, strong_coorder,
    sub_maximal_residuals, weak_coorder, ElimChoice, MetaVariant, RewriteSystem,
};
use redmod_core::vfmod::{phi_family_member, CanonicalModule, PhiVariant, VFModule, VectorField};
use redmod_core::{Error, Expr, MultiIndex};

fn golden(eq: &str) -> (i32, i32, bool) {
    let ctx = JetContext::new(3);
    let l = ctx.parse(eq).unwrap();
    let m = VFModule::shifts(3, &[0, 1]);
    let rep = weak_coorder(&l, &m, &ctx).unwrap();
    (rep.strong_coorder, rep.weak_coorder.unwrap(), rep.maximal_rank_flag)
}

#[test]
fn golden_third_order() {
    let ctx = JetContext::new(3);
    let l = ctx.parse("x2*u[3,0,0]+x1*u[0,3,0]-exp(u[0,0,2])*(u[0,0,1]+u)").unwrap();
    let rep = weak_coorder(&l, &VFModule::shifts(3, &[0, 1]), &ctx).unwrap();
    assert_eq!(rep.associated_function, ctx.parse("-exp(u[0,0,2])*(u[0,0,1]+u)").unwrap());
    assert_eq!(rep.weak_multiplier.unwrap(), ctx.parse("-exp(u[0,0,2])").unwrap());
    assert_eq!(golden("x2*u[3,0,0]+x1*u[0,3,0]-exp(u[0,0,2])*(u[0,0,1]+u)"), (2, 1, true));
}

#[test]
fn golden_second_order() {
    assert_eq!(golden("x2*u[2,0,0]+x1*u[0,2,0]-exp(u[0,0,2])*(u[0,0,1]+u)"), (2, 1, true));
}

#[test]
fn shift_module_regular() {
    assert_eq!(golden("u[0,0,2]+u"), (2, 2, true));
}

#[test]
fn rules_for_exponential_module() {
    let ctx = JetContext::with_time(1);
    let v = VectorField::new(vec![Expr::zero(), Expr::one()], Expr::u()).unwrap();
    let c = VFModule::new(vec![v], 2).unwrap().canonical_basis().unwrap();
    assert_eq!(c.split.checked, vec![1]);
    let rs = build_rewrites(&c, 2, &ctx).unwrap();
    assert_eq!(rs.rules[&MultiIndex::new(&[0, 1])], Expr::u());
    assert_eq!(rs.rules[&MultiIndex::new(&[0, 2])], Expr::u());
    assert_eq!(rs.rules[&MultiIndex::new(&[1, 1])], ctx.parse("u_t").unwrap_or_else(|_| ctx.parse("u[1,0]").unwrap()));
}

#[test]
fn first_rule_shape() {
    let ctx = JetContext::new(3);
    let split = Split::prefix(3, 1);
    let eta = ctx.parse("x1*u").unwrap();
    let c = CanonicalModule::from_coefficients(split, vec![vec![Expr::u(), ctx.parse("x2").unwrap()]], vec![eta]);
    let rs = build_rewrites(&c, 1, &ctx).unwrap();
    assert_eq!(rs.rules[&MultiIndex::new(&[1, 0, 0])], ctx.parse("x1*u - u*u[0,1,0] - x2*u[0,0,1]").unwrap());
}

#[test]
fn trivial_classifications() {
    let ctx = JetContext::new(2);
    let rep = strong_coorder(&ctx.parse("u[1,0]").unwrap(), &VFModule::shifts(2, &[0]), &ctx).unwrap();
    assert_eq!(rep.strong_coorder, -1);
    assert!(rep.ultra);
    let nonvol = VFModule::new(
        vec![
            VectorField::new(vec![Expr::one(), Expr::zero(), Expr::zero()], Expr::zero()).unwrap(),
            VectorField::new(vec![Expr::zero(), Expr::one(), Expr::var(Var::coord(0))], Expr::zero()).unwrap(),
        ],
        3,
    )
    .unwrap();
    let c3 = JetContext::new(3);
    assert!(matches!(strong_coorder(&c3.parse("u[1,0,0]").unwrap(), &nonvol, &c3), Err(Error::NotInvolutive(_))));
}

#[test]
fn heat_equation_coorder_one() {
    let ctx = JetContext::with_time(1);
    let l = ctx.parse("u[1,0]-u[0,2]").unwrap();
    let phi = ctx.parse("u*exp(-t-x)").unwrap();
    let m = phi_family_member(&phi, &Split::from_checked(2, &[1]), &PhiVariant::Involutive).unwrap();
    let rep = strong_coorder(&l, &m, &ctx).unwrap();
    assert_eq!(rep.strong_coorder, 1);
    assert_eq!(rep.associated_function, ctx.parse("u[1,0]-u").unwrap());
}

#[test]
fn elimination_orders_agree_for_phi_family() {
    let ctx = JetContext::new(3);
    let phi = ctx.parse("u^3 + x1*x2*u + x3").unwrap();
    let m = phi_family_member(&phi, &Split::prefix(3, 2), &PhiVariant::Involutive).unwrap();
    let c = m.canonical_basis().unwrap();
    let a = RewriteSystem::build(&c, 3, ElimChoice::First, &ctx).unwrap();
    let b = RewriteSystem::build(&c, 3, ElimChoice::Last, &ctx).unwrap();
    assert_eq!(a.rules.len(), 16);
    for (k, e) in &a.rules {
        assert!((e - &b.rules[k]).is_zero(), "{k}");
        assert!(hat_order(e, &c.split) <= k.order() as i32);
    }
}

#[test]
fn meta_examples() {
    let ctx = JetContext::new(3);
    let split = Split::prefix(3, 2);
    let l = ctx.parse("u[0,0,2]*u[5,0,0]+u").unwrap();
    assert_eq!(meta_singularity_coorder(&l, &split, &MetaVariant::Involutive, &ctx).unwrap().coorder, 2);
    assert_eq!(meta_singularity_coorder(&Expr::u(), &split, &MetaVariant::Involutive, &ctx).unwrap().coorder, 0);
    assert!(matches!(
        meta_singularity_coorder(&Expr::zero(), &split, &MetaVariant::Involutive, &ctx),
        Err(Error::NotMetaSingular)
    ));
    let t = JetContext::with_time(1);
    let evo = t.parse("u[1,0] - u[0,3] - u*u[0,1]").unwrap();
    let rep = meta_singularity_coorder(&evo, &Split::from_checked(2, &[1]), &MetaVariant::Involutive, &t).unwrap();
    assert_eq!(rep.coorder, 1);
}

#[test]
fn family_matches_rewrite_route() {
    let t = JetContext::with_time(1);
    let split = Split::from_checked(2, &[1]);
    let l = t.parse("u[1,0] - u[0,2] - u^2*u[0,1]").unwrap();
    let phi = t.parse("u^2 + t*x*u + x").unwrap();
    let direct = family_reduced_function(&l, &phi, &split, 1, &MetaVariant::Involutive, &t).unwrap();
    let m = phi_family_member(&phi, &split, &PhiVariant::Involutive).unwrap();
    let rep = strong_coorder(&l, &m, &t).unwrap();
    assert!((direct.clone() - rep.associated_function).is_zero());
    assert_eq!(order_of(&direct), 1);
    let res = sub_maximal_residuals(&l, &phi, &split, 1, &MetaVariant::Involutive, &t).unwrap();
    assert_eq!(res.len(), 1);
    assert!((res[0].1.clone() - direct.diff(&Var::jet(MultiIndex::new(&[1, 0])))).is_zero());
}

#[test]
fn special_variant_round_trip() {
    let ctx = JetContext::new(2);
    let xi: Vec<Expr> = vec![];
    // ω_(1,0) = u_(1,0) + u u_(0,1); ω_(0,1) = u_(0,1).
    let l = ctx.parse("u[1,0] + u*u[0,1] + u[0,1]^2").unwrap();
    let rep = meta_singularity_coorder(&l, &Split::prefix(2, 1), &MetaVariant::Special(xi.clone()), &ctx).unwrap();
    assert_eq!(rep.coorder, 1);
    let l2 = ctx.parse("u[2,0] + u[1,0]*u[0,1] + 2*u*u[1,1] + u*u[0,1]^2 + u^2*u[0,2]").unwrap();
    let rep2 = meta_singularity_coorder(&l2, &Split::prefix(2, 1), &MetaVariant::Special(xi), &ctx).unwrap();
    assert_eq!(rep2.coorder, 0);
}
